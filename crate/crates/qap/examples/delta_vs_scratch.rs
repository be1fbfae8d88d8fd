//! Time scratch evaluation against the incremental delta matrix on the same
//! run. Both modes walk the exact same accepted-swap sequence, so the only
//! difference is how each proposal's cost change is obtained.

use qap::{anneal, generate_taixxa, AnnealParams, GeneratorSpec, Mode};

fn main() -> Result<(), qap::Error> {
    let instance = generate_taixxa(&GeneratorSpec::new(80, 5))?;
    let iters = 2_000_000;

    let scratch = anneal(
        &instance,
        &AnnealParams::new(iters, 1).with_mode(Mode::Scratch).recording(),
    )?;
    let delta = anneal(
        &instance,
        &AnnealParams::new(iters, 1).with_mode(Mode::Delta).recording(),
    )?;

    assert!(scratch.same_trace(&delta), "modes must agree step for step");
    let (ts, td) = (scratch.wall_time.as_secs_f64(), delta.wall_time.as_secs_f64());
    println!("identical traces, best cost {}", delta.best_cost);
    println!("scratch: {ts:.3}s");
    println!("delta:   {td:.3}s  ({:.1}x faster)", ts / td);
    Ok(())
}
