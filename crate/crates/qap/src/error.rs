use thiserror::Error;

/// Errors surfaced by instance construction, solver operations and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid swap pair: indices must differ (got {0})")]
    InvalidPair(usize),

    #[error("swap index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),

    #[error("pre-swap snapshot is for pair ({snap_r}, {snap_s}), not ({r}, {s})")]
    SnapshotMismatch {
        snap_r: usize,
        snap_s: usize,
        r: usize,
        s: usize,
    },

    #[error("truncated input: expected {expected} tokens, got {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("instance size must be at least 2, got {0}")]
    Size(usize),

    #[error("negative entry {value} in matrix {matrix} at ({row}, {col})")]
    NegativeEntry {
        matrix: char,
        row: usize,
        col: usize,
        value: i64,
    },

    #[error("iteration index {index} out of range 0..{total}")]
    IterationRange { index: u64, total: u64 },

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
