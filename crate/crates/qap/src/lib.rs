//! Simulated annealing for the quadratic assignment problem (QAP).
//!
//! Given an n-by-n flow matrix `A` and distance matrix `B`, the QAP asks for
//! the assignment `p` of facilities to locations minimizing
//! `sum_ij A[i][j] * B[p(i)][p(j)]`. This crate provides:
//!
//! - exact integer cost evaluation and O(n) single-swap deltas ([`state`]);
//! - a delta matrix caching the cost of every possible swap, kept current
//!   incrementally after each accepted move ([`state`]);
//! - a sequential annealer with a closed-form cooling schedule and
//!   scratch / delta / auto evaluation modes ([`annealer`]);
//! - a data-parallel engine (chunked candidate search, partitioned delta
//!   update, barrier-separated phases) whose results are bit-identical to
//!   the sequential delta mode for any worker count ([`parallel`]);
//! - QAPLIB-format parsing and writing plus a seeded generator for random
//!   symmetric zero-diagonal instances ([`io`]);
//! - a benchmark grid runner emitting CSV ([`bench`]).
//!
//! The `examples/` directory has one runnable example per capability; the
//! `qap` binary wraps the same functionality as `solve`, `bench` and
//! `generate` subcommands.

pub mod annealer;
pub mod bench;
pub mod error;
pub mod instance;
pub mod io;
pub mod pairs;
pub mod parallel;
pub mod rng;
pub mod schedule;
pub mod state;

pub use annealer::{anneal, init_temperature, AnnealParams, Mode, RunStats};
pub use error::{Error, Result};
pub use instance::{Instance, Matrix, Permutation};
pub use io::{generate_taixxa, parse_qaplib, write_qaplib, GeneratorSpec};
pub use parallel::{anneal_parallel, ParallelConfig};
pub use rng::RandomStream;
pub use schedule::{accept, Schedule};
pub use state::{bprime_of, cost, DeltaMatrix, SolverState};
