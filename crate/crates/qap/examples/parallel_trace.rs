//! The parallel engine reproduces the sequential run bit for bit at every
//! worker count: chunked first-accept search changes who finds the accepting
//! proposal, never which proposal is accepted.

use qap::{anneal, anneal_parallel, generate_taixxa, AnnealParams, GeneratorSpec, ParallelConfig};

fn main() -> Result<(), qap::Error> {
    let instance = generate_taixxa(&GeneratorSpec::new(60, 11))?;
    let params = AnnealParams::new(100_000, 3).recording();
    let sequential = anneal(&instance, &params)?;
    println!(
        "sequential: best {} after {} accepted swaps",
        sequential.best_cost,
        sequential.accepted_swaps.len()
    );

    for workers in [1, 2, 4, 8] {
        let parallel = anneal_parallel(&instance, &params, &ParallelConfig::new(workers))?;
        assert!(sequential.same_trace(&parallel));
        println!(
            "workers = {workers}: identical trace, {:.3}s",
            parallel.wall_time.as_secs_f64()
        );
    }
    Ok(())
}
