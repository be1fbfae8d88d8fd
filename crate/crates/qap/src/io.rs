//! QAPLIB-format instance I/O and seeded generation of the random symmetric
//! instance family.
//!
//! The text format follows the public QAPLIB convention: the size `n`, then
//! the n*n flow matrix `A`, then the n*n distance matrix `B`, all as
//! whitespace-separated integers. The writer's layout is fixed (one row per
//! line, a blank line between the matrices) and round-trips through the
//! parser exactly.

use crate::error::{Error, Result};
use crate::instance::{Instance, Matrix};
use crate::rng::RandomStream;

/// Parses a QAPLIB-style instance from text. Any whitespace between tokens
/// is accepted.
pub fn parse_qaplib(text: &str) -> Result<Instance> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let first = tokens.first().ok_or(Error::Truncated {
        expected: 1,
        actual: 0,
    })?;
    let n: usize = first.parse().map_err(|_| Error::Parse {
        position: 0,
        message: format!("expected instance size, got {first:?}"),
    })?;
    if n < 2 {
        return Err(Error::Size(n));
    }
    let expected = 1 + 2 * n * n;
    if tokens.len() != expected {
        return Err(Error::Truncated {
            expected,
            actual: tokens.len(),
        });
    }

    let mut values = Vec::with_capacity(2 * n * n);
    for (position, token) in tokens.iter().enumerate().skip(1) {
        let value: i64 = token.parse().map_err(|_| Error::Parse {
            position,
            message: format!("expected integer, got {token:?}"),
        })?;
        values.push(value);
    }
    let b_values = values.split_off(n * n);
    let a = Matrix::from_flat(n, values)?;
    let b = Matrix::from_flat(n, b_values)?;
    // Negative entries are rejected here, during construction.
    Instance::new(a, b)
}

/// Serializes an instance in the fixed QAPLIB layout.
pub fn write_qaplib(instance: &Instance) -> String {
    let n = instance.n();
    let mut out = String::new();
    out.push_str(&n.to_string());
    out.push('\n');
    for (index, matrix) in [instance.a(), instance.b()].into_iter().enumerate() {
        if index == 1 {
            out.push('\n');
        }
        for i in 0..n {
            let row: Vec<String> = matrix.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parameters for the random symmetric zero-diagonal instance family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub seed: u64,
    /// Upper bound (inclusive) for off-diagonal entries; entries are uniform
    /// in `[1, max_value]`.
    pub max_value: i64,
}

impl GeneratorSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            max_value: 100,
        }
    }

    pub fn with_max_value(mut self, max_value: i64) -> Self {
        self.max_value = max_value;
        self
    }
}

/// Generates a random instance: both matrices symmetric with zero diagonals,
/// off-diagonal entries independent uniform in `[1, max_value]`.
///
/// Draws come from `RandomStream(seed)` at consecutive indices 0, 1, 2, ...
/// over a fixed order: A's upper triangle row-major, then B's. Deterministic
/// per spec.
pub fn generate_taixxa(spec: &GeneratorSpec) -> Result<Instance> {
    if spec.n < 2 {
        return Err(Error::Size(spec.n));
    }
    if spec.max_value < 1 {
        return Err(Error::Config(format!(
            "max_value must be at least 1, got {}",
            spec.max_value
        )));
    }
    let stream = RandomStream::new(spec.seed);
    let mut index = 0i64;
    let mut draw = || {
        let v = stream.uniform_index(index, spec.max_value as u64) as i64 + 1;
        index += 1;
        v
    };
    let mut fill = |n: usize| {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let v = draw();
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    };
    let a = fill(spec.n);
    let b = fill(spec.n);
    Instance::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Permutation;

    #[test]
    fn parses_the_two_line_and_single_line_forms() {
        let inst = parse_qaplib("2\n0 1\n1 0\n0 3\n3 0").unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.a().row(0), &[0, 1]);
        assert_eq!(inst.b().row(1), &[3, 0]);
        assert!(inst.is_symmetric() && inst.has_zero_diagonal());

        let inst3 = parse_qaplib("3 0 1 2 1 0 3 2 3 0 0 4 5 4 0 6 5 6 0").unwrap();
        assert_eq!(inst3.n(), 3);
        assert_eq!(
            crate::state::cost(&inst3, &Permutation::identity(3)).unwrap(),
            64
        );
        // Tabs and newlines are interchangeable.
        let tabbed = parse_qaplib("2\t0 1\n1\t0\r\n0 3 3 0").unwrap();
        assert_eq!(tabbed.a().row(0), &[0, 1]);
    }

    #[test]
    fn reports_malformed_inputs_precisely() {
        assert!(matches!(
            parse_qaplib("2 0 1 1 0 0 3 3"),
            Err(Error::Truncated {
                expected: 9,
                actual: 8
            })
        ));
        assert!(matches!(
            parse_qaplib("2 0 1 1 0 0 3 3 0 5"),
            Err(Error::Truncated {
                expected: 9,
                actual: 10
            })
        ));
        assert!(matches!(
            parse_qaplib("2 0 x 1 0 0 3 3 0"),
            Err(Error::Parse { position: 2, .. })
        ));
        assert!(matches!(parse_qaplib("1 0 0"), Err(Error::Size(1))));
        assert!(matches!(parse_qaplib(""), Err(Error::Truncated { .. })));
        assert!(matches!(
            parse_qaplib("2 0 -1 -1 0 0 3 3 0"),
            Err(Error::NegativeEntry { .. })
        ));
    }

    #[test]
    fn writer_layout_is_exact() {
        let inst = parse_qaplib("2 0 1 1 0 0 3 3 0").unwrap();
        assert_eq!(write_qaplib(&inst), "2\n0 1\n1 0\n\n0 3\n3 0\n");
    }

    #[test]
    fn roundtrip_identity_on_generated_instances() {
        for seed in 0..20 {
            let n = 2 + (seed as usize * 7) % 30;
            let inst = generate_taixxa(&GeneratorSpec::new(n, seed)).unwrap();
            let back = parse_qaplib(&write_qaplib(&inst)).unwrap();
            assert_eq!(inst, back);
        }
    }

    #[test]
    fn generator_family_properties() {
        let spec = GeneratorSpec::new(100, 42);
        let inst = generate_taixxa(&spec).unwrap();
        assert!(inst.is_symmetric());
        assert!(inst.has_zero_diagonal());
        assert_eq!(generate_taixxa(&spec).unwrap(), inst);
        assert_ne!(generate_taixxa(&GeneratorSpec::new(100, 43)).unwrap(), inst);

        // Empirical mean of the 4950 upper-triangle entries of A against the
        // binomial confidence band around the uniform(1..100) mean of 50.5.
        let mut sum = 0f64;
        for i in 0..100 {
            for j in i + 1..100 {
                let v = inst.a().get(i, j);
                assert!((1..=100).contains(&v));
                sum += v as f64;
            }
        }
        let mean = sum / 4950.0;
        assert!((45.0..=56.0).contains(&mean), "mean = {mean}");
    }

    #[test]
    fn generator_rejects_bad_specs() {
        assert!(matches!(
            generate_taixxa(&GeneratorSpec::new(1, 0)),
            Err(Error::Size(1))
        ));
        assert!(matches!(
            generate_taixxa(&GeneratorSpec::new(5, 0).with_max_value(0)),
            Err(Error::Config(_))
        ));
    }
}
