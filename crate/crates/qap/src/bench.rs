//! Benchmark grid runner.
//!
//! Runs a grid of (size, iteration count, mode, workers, seed) cells on
//! generated instances and emits one CSV row per cell, flushed row by row so
//! an interrupted grid loses at most the row in flight. Seeds are shared
//! across modes, so rows for the same cell coordinates are directly
//! comparable; for the trace-equivalent delta modes the best costs must agree
//! exactly.
//!
//! After the data rows the runner appends derived speedup rows,
//! `P = t_reference / t_parallel`, averaged over seeds per
//! (n, iters, workers). Speedup rows reuse the same schema with
//! `mode = "speedup"`: the ratio is carried in the `wall_time_s` column and
//! the remaining measurement columns are zeroed.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::annealer::{anneal, AnnealParams, Mode};
use crate::error::{Error, Result};
use crate::io::{generate_taixxa, GeneratorSpec};
use crate::parallel::{anneal_parallel, ParallelConfig};

/// Engine selection for a benchmark cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchMode {
    Scratch,
    DeltaSeq,
    DeltaPar,
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMode::Scratch => "scratch",
            BenchMode::DeltaSeq => "delta-seq",
            BenchMode::DeltaPar => "delta-par",
        })
    }
}

impl FromStr for BenchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scratch" => Ok(BenchMode::Scratch),
            "delta-seq" => Ok(BenchMode::DeltaSeq),
            "delta-par" => Ok(BenchMode::DeltaPar),
            other => Err(Error::Config(format!(
                "unknown bench mode {other:?} (expected scratch, delta-seq or delta-par)"
            ))),
        }
    }
}

pub const CSV_HEADER: &str = "n,iters,mode,workers,wall_time_s,best_cost,acceptance_rate,seed";

/// One measurement (or derived speedup) row of the CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub iters: u64,
    pub mode: String,
    pub workers: usize,
    pub wall_time_s: f64,
    pub best_cost: i64,
    pub acceptance_rate: f64,
    pub seed: u64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{},{:.6},{}",
            self.n,
            self.iters,
            self.mode,
            self.workers,
            self.wall_time_s,
            self.best_cost,
            self.acceptance_rate,
            self.seed
        )
    }
}

/// The full experiment grid.
#[derive(Debug, Clone)]
pub struct BenchGrid {
    pub sizes: Vec<usize>,
    pub iters: Vec<u64>,
    pub seeds: Vec<u64>,
    pub modes: Vec<BenchMode>,
    /// Worker counts for `delta-par` cells; sequential modes ignore it.
    pub workers: Vec<usize>,
    /// Baseline mode for the derived speedup rows.
    pub reference: BenchMode,
    /// Seed for instance generation, shared by every cell of a given size.
    pub gen_seed: u64,
    pub max_value: i64,
}

impl BenchGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, empty) in [
            ("sizes", self.sizes.is_empty()),
            ("iters", self.iters.is_empty()),
            ("seeds", self.seeds.is_empty()),
            ("modes", self.modes.is_empty()),
        ] {
            if empty {
                return Err(Error::Config(format!("bench grid has no {name}")));
            }
        }
        if self.iters.contains(&0) {
            return Err(Error::Config("iteration counts must be at least 1".into()));
        }
        if self.modes.contains(&BenchMode::DeltaPar) && self.workers.is_empty() {
            return Err(Error::Config(
                "delta-par mode requires at least one worker count".into(),
            ));
        }
        if self.reference == BenchMode::DeltaPar {
            return Err(Error::Config(
                "speedup reference must be a sequential mode (scratch or delta-seq)".into(),
            ));
        }
        Ok(())
    }
}

/// One grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub n: usize,
    pub iters: u64,
    pub mode: BenchMode,
    pub workers: usize,
    pub seed: u64,
}

/// Expands the grid into cells in deterministic order. Sequential modes get
/// a single cell with `workers = 1`; `delta-par` gets one per worker count.
pub fn cells(grid: &BenchGrid) -> Vec<Cell> {
    let mut out = Vec::new();
    for &n in &grid.sizes {
        for &iters in &grid.iters {
            for &mode in &grid.modes {
                let worker_counts: &[usize] = match mode {
                    BenchMode::DeltaPar => &grid.workers,
                    _ => &[1],
                };
                for &workers in worker_counts {
                    for &seed in &grid.seeds {
                        out.push(Cell {
                            n,
                            iters,
                            mode,
                            workers,
                            seed,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Runs a single cell. Wall time is the engine's own measurement, which
/// includes delta-matrix initialization but excludes instance generation.
pub fn run_cell(cell: &Cell, gen_seed: u64, max_value: i64) -> Result<BenchRow> {
    let instance =
        generate_taixxa(&GeneratorSpec::new(cell.n, gen_seed).with_max_value(max_value))?;
    let params = AnnealParams::new(cell.iters, cell.seed);
    let stats = match cell.mode {
        BenchMode::Scratch => anneal(&instance, &params.with_mode(Mode::Scratch))?,
        BenchMode::DeltaSeq => anneal(&instance, &params.with_mode(Mode::Delta))?,
        BenchMode::DeltaPar => {
            anneal_parallel(&instance, &params, &ParallelConfig::new(cell.workers))?
        }
    };
    Ok(BenchRow {
        n: cell.n,
        iters: cell.iters,
        mode: cell.mode.to_string(),
        workers: cell.workers,
        wall_time_s: stats.wall_time.as_secs_f64(),
        best_cost: stats.best_cost,
        acceptance_rate: stats.acceptance_rate,
        seed: cell.seed,
    })
}

/// Derives speedup rows from measured data rows: per (n, iters, workers),
/// the seed-averaged reference wall time over the seed-averaged delta-par
/// wall time.
pub fn speedup_rows(rows: &[BenchRow], reference: BenchMode) -> Vec<BenchRow> {
    let reference_name = reference.to_string();
    let parallel_name = BenchMode::DeltaPar.to_string();
    let mean = |rows: &[&BenchRow]| -> Option<f64> {
        if rows.is_empty() {
            return None;
        }
        Some(rows.iter().map(|r| r.wall_time_s).sum::<f64>() / rows.len() as f64)
    };

    let mut keys: Vec<(usize, u64, usize)> = rows
        .iter()
        .filter(|r| r.mode == parallel_name)
        .map(|r| (r.n, r.iters, r.workers))
        .collect();
    keys.sort_unstable();
    keys.dedup();

    let mut out = Vec::new();
    for (n, iters, workers) in keys {
        let par: Vec<&BenchRow> = rows
            .iter()
            .filter(|r| r.mode == parallel_name && (r.n, r.iters, r.workers) == (n, iters, workers))
            .collect();
        let base: Vec<&BenchRow> = rows
            .iter()
            .filter(|r| r.mode == reference_name && (r.n, r.iters) == (n, iters))
            .collect();
        if let (Some(t_par), Some(t_ref)) = (mean(&par), mean(&base)) {
            out.push(BenchRow {
                n,
                iters,
                mode: "speedup".into(),
                workers,
                wall_time_s: t_ref / t_par,
                best_cost: 0,
                acceptance_rate: 0.0,
                seed: 0,
            });
        }
    }
    out
}

/// Runs the whole grid, streaming CSV to `out` (header first, every row
/// flushed as soon as it is measured) and returning all rows including the
/// derived speedups.
pub fn run_grid<W: Write>(grid: &BenchGrid, out: &mut W) -> Result<Vec<BenchRow>> {
    grid.validate()?;
    writeln!(out, "{CSV_HEADER}")?;
    out.flush()?;
    let mut rows = Vec::new();
    for cell in cells(grid) {
        let row = run_cell(&cell, grid.gen_seed, grid.max_value)?;
        writeln!(out, "{}", row.csv_line())?;
        out.flush()?;
        rows.push(row);
    }
    let derived = speedup_rows(&rows, grid.reference);
    for row in &derived {
        writeln!(out, "{}", row.csv_line())?;
        out.flush()?;
    }
    rows.extend(derived);
    Ok(rows)
}
