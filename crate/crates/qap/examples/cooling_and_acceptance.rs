//! Inspect the inverse-linear cooling schedule and the acceptance rule, and
//! show how the default temperature bounds are sampled from an instance.

use qap::schedule::accept;
use qap::{generate_taixxa, init_temperature, GeneratorSpec, Permutation, RandomStream, Schedule};

fn main() -> Result<(), qap::Error> {
    let instance = generate_taixxa(&GeneratorSpec::new(40, 8))?;
    let stream = RandomStream::new(1);
    let perm = Permutation::shuffled(instance.n(), &stream);
    let (t0, tf) = init_temperature(&instance, &perm, &stream)?;
    println!("sampled bounds: t0 = {t0:.1}, tf = {tf:.1}");

    let iters = 1_000_000;
    let schedule = Schedule::new(t0, tf, iters)?;
    for k in [0, iters / 100, iters / 10, iters / 2, iters - 1] {
        println!("T({k:>7}) = {:.3}", schedule.temperature_at(k)?);
    }

    // Accept iff delta < 0 or exp(-delta / T) > r.
    for (delta, temperature, r) in [(-5, 1.0, 0.99), (20, 100.0, 0.5), (20, 5.0, 0.5)] {
        println!(
            "accept(delta = {delta:>3}, T = {temperature:>5}, r = {r}) = {}",
            accept(delta, temperature, r)?
        );
    }
    Ok(())
}
