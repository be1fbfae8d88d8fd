//! Sequential simulated annealing.
//!
//! One run proposes exactly `iters` swaps. Iteration `k` draws its candidate
//! from the cyclic pair enumeration, its uniform variate from the counter
//! stream at index `k` and its temperature from the closed-form schedule, so
//! the whole proposal sequence is a pure function of `(instance, params)`.
//! The swap delta is either looked up in the delta matrix (delta mode) or
//! evaluated from scratch per proposal (scratch mode); `auto` starts in
//! scratch mode and pays the one-time O(n^3) delta matrix build once the
//! trailing acceptance rate falls below a threshold, where the incremental
//! bookkeeping starts to win.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::instance::{Instance, Permutation};
use crate::pairs::pair_count;
use crate::rng::RandomStream;
use crate::schedule::{accept_inv_unchecked, Schedule};
use crate::state::SolverState;

/// How swap deltas are evaluated during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Evaluate each proposed swap from scratch, O(n) per proposal.
    Scratch,
    /// Keep the delta matrix current and look proposals up in O(1).
    Delta,
    /// Start in scratch mode, switch to delta mode when the trailing
    /// acceptance rate drops below the configured threshold.
    Auto,
}

#[derive(Debug, Clone)]
pub struct AnnealParams {
    pub iters: u64,
    pub seed: u64,
    /// Overrides the sampled `(t0, tf)` when set.
    pub temperatures: Option<(f64, f64)>,
    pub mode: Mode,
    /// Auto mode switches once the trailing-window acceptance rate drops
    /// below this value.
    pub auto_switch_threshold: f64,
    /// Trailing window length, in proposals, for the auto-mode switch.
    pub auto_switch_window: u64,
    /// Record the accepted-swap sequence in the returned stats.
    pub record_swaps: bool,
}

impl AnnealParams {
    pub fn new(iters: u64, seed: u64) -> Self {
        Self {
            iters,
            seed,
            temperatures: None,
            mode: Mode::Delta,
            auto_switch_threshold: 0.1,
            auto_switch_window: 10_000,
            record_swaps: false,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_temperatures(mut self, t0: f64, tf: f64) -> Self {
        self.temperatures = Some((t0, tf));
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_swaps = true;
        self
    }
}

/// One accepted swap: the proposal index it happened at and the pair swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcceptedSwap {
    pub iteration: u64,
    pub r: u32,
    pub s: u32,
}

/// Outcome of a run.
#[derive(Debug, Clone)]
pub struct RunStats {
    pub iterations: u64,
    pub accepted: u64,
    pub acceptance_rate: f64,
    pub best_cost: i64,
    pub final_cost: i64,
    pub best_perm: Permutation,
    pub final_perm: Permutation,
    pub wall_time: Duration,
    /// Populated only when `record_swaps` was set.
    pub accepted_swaps: Vec<AcceptedSwap>,
}

impl RunStats {
    /// Equality of everything a deterministic rerun must reproduce, i.e. all
    /// fields except the wall time.
    pub fn same_trace(&self, other: &RunStats) -> bool {
        self.iterations == other.iterations
            && self.accepted == other.accepted
            && self.acceptance_rate == other.acceptance_rate
            && self.best_cost == other.best_cost
            && self.final_cost == other.final_cost
            && self.best_perm == other.best_perm
            && self.final_perm == other.final_perm
            && self.accepted_swaps == other.accepted_swaps
    }
}

/// Samples swap deltas at the starting assignment to derive temperature
/// bounds: `tf` is the smallest nonzero |delta| seen, `t0` adds a tenth of
/// the observed spread. Falls back to `(1.0, 0.1)` when every sampled delta
/// is zero. Stream indices `-(n+1)` and below are used, clear of both the
/// proposal range and the shuffle draws.
pub fn init_temperature(
    instance: &Instance,
    perm: &Permutation,
    stream: &RandomStream,
) -> Result<(f64, f64)> {
    let state = SolverState::new(instance, perm.clone())?;
    let total = pair_count(instance.n());
    let sample_target = total.min(1000);

    let mut magnitudes = Vec::with_capacity(sample_target);
    if sample_target == total {
        for k in 0..total {
            let (r, s) = crate::pairs::pair_at(instance.n(), k);
            magnitudes.push(state.swap_delta(r, s)?.unsigned_abs());
        }
    } else {
        let mut seen = std::collections::HashSet::with_capacity(sample_target);
        let mut index = -(instance.n() as i64) - 1;
        while seen.len() < sample_target {
            let k = stream.uniform_index(index, total as u64) as usize;
            index -= 1;
            if seen.insert(k) {
                let (r, s) = crate::pairs::pair_at(instance.n(), k);
                magnitudes.push(state.swap_delta(r, s)?.unsigned_abs());
            }
        }
    }

    let dmax = magnitudes.iter().copied().max().unwrap_or(0);
    if dmax == 0 {
        return Ok((1.0, 0.1));
    }
    let dmin = magnitudes
        .iter()
        .copied()
        .filter(|&m| m > 0)
        .min()
        .expect("dmax > 0 implies a nonzero magnitude");
    let (dmin, dmax) = (dmin as f64, dmax as f64);
    Ok((dmin + (dmax - dmin) / 10.0, dmin))
}

/// Shared run setup: validate parameters, shuffle the starting assignment,
/// derive temperatures and build the schedule. The parallel engine goes
/// through the same path so its setup is bit-identical to the sequential one.
pub(crate) fn setup_run<'a>(
    instance: &'a Instance,
    params: &AnnealParams,
) -> Result<(RandomStream, SolverState<'a>, Schedule)> {
    if params.iters == 0 {
        return Err(Error::Config("iteration count must be at least 1".into()));
    }
    let stream = RandomStream::new(params.seed);
    let perm = Permutation::shuffled(instance.n(), &stream);
    let (t0, tf) = match params.temperatures {
        Some(bounds) => bounds,
        None => init_temperature(instance, &perm, &stream)?,
    };
    let schedule = Schedule::new(t0, tf, params.iters)?;
    let state = SolverState::new(instance, perm)?;
    Ok((stream, state, schedule))
}

/// Scans proposals `from..to` against a frozen slice of delta entries and
/// returns the first accepting proposal index. The pair of proposal `k` is
/// `pairs[k % npairs]` and its entry sits at that same linear index, so the
/// scan walks the slice cyclically without any pair bookkeeping. This is the
/// shared hot loop: the sequential delta mode runs it over the full remaining
/// range and each parallel worker runs it over its share of a chunk.
pub(crate) fn scan_accepting(
    entries: &[i64],
    schedule: &Schedule,
    stream: &RandomStream,
    from: u64,
    to: u64,
) -> Option<u64> {
    let total_pairs = entries.len() as u64;
    let mut idx = (from % total_pairs) as usize;
    let mut k = from;
    // Walk the entry slice in wraparound segments so the inner loop is a
    // plain slice traversal with no index arithmetic. The loop body is a
    // branchless rejection proof (the two exp-free sufficient conditions of
    // `accept_inv_unchecked` combined with `&`/`|` instead of `&&`/`||`);
    // the rare proposals it cannot dismiss go through the canonical function,
    // so the decisions are exactly its decisions at every index.
    while k < to {
        let seg = (entries.len() - idx).min((to - k) as usize);
        for (j, &delta) in entries[idx..idx + seg].iter().enumerate() {
            let i = k + j as u64;
            let inv_t = schedule.inv_temperature_at_unchecked(i);
            let r = stream.uniform(i as i64);
            let x = delta as f64 * inv_t;
            // Branchless rejection proof built from the two exp-free
            // sufficient conditions of `accept_inv_unchecked`; anything it
            // cannot dismiss goes through the canonical function, so the
            // decisions are exactly its decisions at every index.
            let fast_reject =
                (delta > 0) & (((x >= 38.0) & (r > 0.0)) | (r * (1.0 + x) >= 1.0 + 1e-9));
            if !fast_reject && accept_inv_unchecked(delta, inv_t, r) {
                return Some(i);
            }
        }
        k += seg as u64;
        idx = 0;
    }
    None
}

/// Runs simulated annealing and returns the run statistics.
pub fn anneal(instance: &Instance, params: &AnnealParams) -> Result<RunStats> {
    let started = Instant::now();
    if matches!(params.mode, Mode::Delta | Mode::Auto) && !instance.supports_delta_fast_path() {
        return Err(Error::UnsupportedInstance(
            "delta and auto modes require a symmetric instance with zero diagonals".into(),
        ));
    }
    let (stream, mut state, schedule) = setup_run(instance, params)?;

    let n = instance.n();
    let total_pairs = pair_count(n);

    let mut accepted = 0u64;
    let mut best_cost = state.cost();
    let mut best_perm = state.perm().clone();
    let mut accepted_swaps = Vec::new();

    // First proposal index of the delta-mode phase: 0 for Mode::Delta, the
    // whole run (i.e. never reached) for Mode::Scratch, decided on the fly
    // for Mode::Auto.
    let mut delta_from = match params.mode {
        Mode::Delta => 0,
        Mode::Scratch => params.iters,
        Mode::Auto => params.iters,
    };

    if !matches!(params.mode, Mode::Delta) {
        // Scratch phase: per-proposal O(n) evaluation with explicit candidate
        // bookkeeping, plus the trailing acceptance window for the auto switch.
        let auto = matches!(params.mode, Mode::Auto);
        let window = (params.auto_switch_window.max(1) as usize).min(params.iters as usize);
        let mut ring = if auto { vec![false; window] } else { Vec::new() };
        let mut window_hits = 0usize;
        let (mut r, mut s) = (0usize, 1usize);

        for k in 0..params.iters {
            let delta = state.swap_delta(r, s)?;
            let accepted_now = accept_inv_unchecked(
                delta,
                schedule.inv_temperature_at_unchecked(k),
                stream.uniform(k as i64),
            );
            if accepted_now {
                state.apply_swap(r, s)?;
                accepted += 1;
                if state.cost() < best_cost {
                    best_cost = state.cost();
                    best_perm = state.perm().clone();
                }
                if params.record_swaps {
                    accepted_swaps.push(AcceptedSwap {
                        iteration: k,
                        r: r as u32,
                        s: s as u32,
                    });
                }
            }

            if auto {
                let slot = (k as usize) % window;
                if ring[slot] {
                    window_hits -= 1;
                }
                ring[slot] = accepted_now;
                if accepted_now {
                    window_hits += 1;
                }
                if k + 1 >= window as u64
                    && (window_hits as f64) < params.auto_switch_threshold * window as f64
                {
                    delta_from = k + 1;
                    break;
                }
            }

            if s + 1 < n {
                s += 1;
            } else if r + 2 < n {
                r += 1;
                s = r + 1;
            } else {
                r = 0;
                s = 1;
            }
        }
    }

    if delta_from < params.iters {
        state.init_delta_matrix()?;
    }

    // Delta phase: scan the frozen delta entries for the next acceptance,
    // then apply the swap and refresh the matrix.
    let mut k = delta_from;
    while k < params.iters {
        let hit = scan_accepting(
            state
                .delta()
                .expect("delta matrix initialized for the delta phase")
                .entries(),
            &schedule,
            &stream,
            k,
            params.iters,
        );
        let Some(hit) = hit else {
            break;
        };
        let (r, s) = crate::pairs::pair_at(n, (hit % total_pairs as u64) as usize);
        let snap = state.snapshot(r, s)?;
        state.apply_swap(r, s)?;
        state.update_delta_matrix(r, s, &snap)?;
        accepted += 1;
        if state.cost() < best_cost {
            best_cost = state.cost();
            best_perm = state.perm().clone();
        }
        if params.record_swaps {
            accepted_swaps.push(AcceptedSwap {
                iteration: hit,
                r: r as u32,
                s: s as u32,
            });
        }
        k = hit + 1;
    }

    Ok(RunStats {
        iterations: params.iters,
        accepted,
        acceptance_rate: accepted as f64 / params.iters as f64,
        best_cost,
        final_cost: state.cost(),
        best_perm,
        final_perm: state.perm().clone(),
        wall_time: started.elapsed(),
        accepted_swaps,
    })
}
