//! Cooling schedule and the acceptance rule.
//!
//! The temperature is a closed-form function of the iteration index, not a
//! mutated accumulator: the parallel engine evaluates proposals out of order
//! and must be able to ask for the temperature of any future iteration
//! directly. The inverse-linear form `T(k) = t0 / (1 + k * beta * t0)` with
//! `beta = (t0 - tf) / ((I - 1) * t0 * tf)` interpolates from `t0` at k = 0 to
//! `tf` at k = I - 1 and matches the fixed point of the iterative rule
//! `T_{k+1} = T_k / (1 + beta * T_k)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    t0: f64,
    tf: f64,
    total_iters: u64,
    beta: f64,
}

impl Schedule {
    pub fn new(t0: f64, tf: f64, total_iters: u64) -> Result<Self> {
        if !(tf > 0.0) || !(t0 >= tf) || !t0.is_finite() {
            return Err(Error::Schedule(format!(
                "temperatures must satisfy t0 >= tf > 0 (got t0 = {t0}, tf = {tf})"
            )));
        }
        if total_iters == 0 {
            return Err(Error::Schedule("total_iters must be at least 1".into()));
        }
        let beta = if total_iters > 1 {
            (t0 - tf) / ((total_iters - 1) as f64 * t0 * tf)
        } else {
            0.0
        };
        Ok(Self {
            t0,
            tf,
            total_iters,
            beta,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn total_iters(&self) -> u64 {
        self.total_iters
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Temperature at iteration `k`, range-checked.
    pub fn temperature_at(&self, k: u64) -> Result<f64> {
        if k >= self.total_iters {
            return Err(Error::IterationRange {
                index: k,
                total: self.total_iters,
            });
        }
        Ok(self.temperature_at_unchecked(k))
    }

    #[inline(always)]
    pub(crate) fn temperature_at_unchecked(&self, k: u64) -> f64 {
        self.t0 / (1.0 + k as f64 * self.beta * self.t0)
    }

    /// `1 / T(k)` in the algebraically equivalent form `1/t0 + k * beta`.
    /// The hot loops multiply the delta by this instead of dividing twice
    /// (once for `T(k)`, once for `delta / T`).
    #[inline(always)]
    pub(crate) fn inv_temperature_at_unchecked(&self, k: u64) -> f64 {
        1.0 / self.t0 + k as f64 * self.beta
    }
}

/// Acceptance test against the reciprocal temperature; the decision rule is
/// the one in [`accept`]. Every engine evaluates proposals through this exact
/// function, so sequential and parallel runs agree bit for bit.
#[inline(always)]
pub(crate) fn accept_inv_unchecked(delta: i64, inv_temperature: f64, r: f64) -> bool {
    if delta <= 0 {
        // delta = 0: exp(0) = 1 > r for every r in [0, 1).
        return true;
    }
    let x = delta as f64 * inv_temperature;
    if x >= 38.0 {
        // exp(-38) < 3.2e-17 is below 2^-53, the smallest nonzero value the
        // uniform draw can take, so the comparison reduces to r == 0. This
        // shortcut is exact and skips the exp call in the frozen regime.
        return r == 0.0;
    }
    if r * (1.0 + x) >= 1.0 + 1e-9 {
        // exp(-x) < 1/(1+x) for x > 0, and the 1e-9 margin dwarfs every
        // rounding error in the product (at most a few units in 1e-15), so
        // this is a proof of rejection. Ambiguous cases fall through to exp.
        return false;
    }
    (-x).exp() > r
}

/// The annealing acceptance rule: accept iff `delta < 0` or
/// `exp(-delta / temperature) > r`.
///
/// A zero delta is not a strict improvement but always passes the second
/// branch, since `exp(0) = 1 > r` for every `r` in `[0, 1)`.
///
/// `r` is expected to be a uniform draw with 53-bit granularity (as produced
/// by [`RandomStream::uniform`](crate::rng::RandomStream::uniform)): the
/// implementation skips the exp call once `delta / temperature >= 38`, which
/// is exact for any `r` that is either zero or at least `2^-53`.
pub fn accept(delta: i64, temperature: f64, r: f64) -> Result<bool> {
    if !(temperature > 0.0) {
        return Err(Error::Schedule(format!(
            "temperature must be positive (got {temperature})"
        )));
    }
    Ok(accept_unchecked(delta, temperature, r))
}

#[inline(always)]
pub(crate) fn accept_unchecked(delta: i64, temperature: f64, r: f64) -> bool {
    accept_inv_unchecked(delta, 1.0 / temperature, r)
}
