//! Generate a small instance and run a single annealing run with the
//! sampled default temperatures.

use qap::{anneal, generate_taixxa, AnnealParams, GeneratorSpec};

fn main() -> Result<(), qap::Error> {
    let instance = generate_taixxa(&GeneratorSpec::new(30, 42))?;
    let stats = anneal(&instance, &AnnealParams::new(200_000, 1))?;
    println!("n = {}", instance.n());
    println!("best cost      = {}", stats.best_cost);
    println!("final cost     = {}", stats.final_cost);
    println!("acceptance     = {:.4}", stats.acceptance_rate);
    println!("wall time      = {:.3}s", stats.wall_time.as_secs_f64());
    println!("best assignment: {:?}", stats.best_perm.as_slice());
    Ok(())
}
