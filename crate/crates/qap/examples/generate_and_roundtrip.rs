//! Generate a random symmetric zero-diagonal instance, serialize it in the
//! whitespace-separated file format and parse it back.

use qap::{generate_taixxa, parse_qaplib, write_qaplib, GeneratorSpec};

fn main() -> Result<(), qap::Error> {
    let spec = GeneratorSpec::new(6, 123).with_max_value(50);
    let instance = generate_taixxa(&spec)?;
    let text = write_qaplib(&instance);
    println!("{text}");

    let back = parse_qaplib(&text)?;
    assert_eq!(back, instance, "round-trip must be exact");
    println!("round-trip exact for n = {}", instance.n());

    // Malformed inputs are classified, not silently patched.
    println!("{:?}", parse_qaplib("2 0 1 1 0 0 3 3"));
    println!("{:?}", parse_qaplib("2 0 x 1 0 0 3 3 0"));
    Ok(())
}
