//! Run a small benchmark grid in process and print the CSV, including the
//! aggregated speedup rows against the chosen reference mode.

use qap::bench::{run_grid, BenchGrid, BenchMode};

fn main() -> Result<(), qap::Error> {
    let grid = BenchGrid {
        sizes: vec![30, 60],
        iters: vec![10_000, 100_000],
        seeds: vec![1, 2, 3],
        modes: vec![BenchMode::Scratch, BenchMode::DeltaSeq, BenchMode::DeltaPar],
        workers: vec![2],
        reference: BenchMode::Scratch,
        gen_seed: 1,
        max_value: 100,
    };
    run_grid(&grid, &mut std::io::stdout().lock())?;
    Ok(())
}
