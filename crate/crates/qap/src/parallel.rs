//! Data-parallel annealing engine.
//!
//! The decomposition mirrors the sequential delta-mode loop phase by phase:
//! workers scan a chunk of upcoming proposals against the frozen delta matrix
//! and return the earliest accepting one, the orchestrator applies that swap,
//! then workers rewrite disjoint contiguous ranges of the delta matrix. A
//! full barrier separates the phases, so no worker ever reads the delta
//! matrix, `B'` or the permutation while another phase writes them.
//!
//! Because the temperature is a closed form in the proposal index and the
//! random variates come from a counter-based stream, the accept decision for
//! any proposal can be evaluated out of order. Scanning a chunk under the
//! frozen state and taking the minimum accepting index therefore reproduces
//! the sequential scan exactly: rejected proposals never change state, and
//! everything before the first accepting index was evaluated under the same
//! state a sequential pass would have seen. The engine's output is
//! bit-identical to [`anneal`] in delta mode for every worker count.
//!
//! [`anneal`]: crate::annealer::anneal

use std::cell::UnsafeCell;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;

use crate::annealer::{setup_run, AcceptedSwap, AnnealParams, RunStats};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::pairs::PairTable;
use crate::rng::RandomStream;
use crate::schedule::Schedule;
use crate::state::{update_delta_range, SolverState, SwapSnapshot};

/// Worker layout for a parallel run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelConfig {
    /// Number of workers, including the orchestrating thread.
    pub workers: usize,
    /// Minimum delta-matrix entries per worker in the update phase; the
    /// effective worker count shrinks on small instances to keep ranges at
    /// least this long.
    pub elems_per_worker: usize,
    /// Proposals evaluated per search chunk.
    pub chunk_size: usize,
}

impl ParallelConfig {
    /// Defaults from the per-thread element budget: 16 update elements per
    /// worker and chunks of `16 * workers` proposals.
    pub fn new(workers: usize) -> Self {
        Self {
            workers,
            elems_per_worker: 16,
            chunk_size: 16 * workers.max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers < 1 || self.elems_per_worker < 1 || self.chunk_size < 1 {
            return Err(Error::Config(format!(
                "workers, elems_per_worker and chunk_size must all be at least 1 \
                 (got {}, {}, {})",
                self.workers, self.elems_per_worker, self.chunk_size
            )));
        }
        Ok(())
    }

    /// Worker count actually used for an update over `total_elems` entries.
    pub fn effective_workers(&self, total_elems: usize) -> usize {
        self.workers.min((total_elems / self.elems_per_worker).max(1))
    }
}

/// Result of evaluating one chunk of proposals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkVerdict {
    pub found: bool,
    /// Earliest accepting pair in the chunk, if any.
    pub pair: Option<(usize, usize)>,
    /// Global proposal index of that pair when found, otherwise the first
    /// index after the chunk.
    pub iteration: u64,
    /// How many proposals in the chunk would accept. Diagnostic only: all but
    /// the first are discarded and re-proposed after the state changes.
    pub accepted_in_chunk: usize,
}

/// Outcome of searching forward for the next accepting swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    Accepted {
        pair: (usize, usize),
        /// Global proposal index at which the swap accepts.
        iteration: u64,
        /// First proposal index of the next search.
        next_cursor: u64,
    },
    /// The proposal budget ran out with no acceptance.
    Exhausted { proposals: u64 },
}

/// Near-equal contiguous split of `base..base + len` into `parts` ranges.
fn split_span(base: u64, len: u64, parts: usize, part: usize) -> Range<u64> {
    let parts = parts as u64;
    let part = part as u64;
    let per = len / parts;
    let rem = len % parts;
    let start = base + part * per + part.min(rem);
    let size = per + u64::from(part < rem);
    start..start + size
}

fn update_ranges(total: usize, workers: usize) -> Vec<Range<usize>> {
    (0..workers)
        .map(|w| {
            let r = split_span(0, total as u64, workers, w);
            r.start as usize..r.end as usize
        })
        .collect()
}

/// Sequential scan of proposals `from..to` against frozen delta entries;
/// returns the first accepting proposal index. This is the primitive each
/// worker runs on its share of a chunk, and with the full range it is the
/// sequential oracle the chunk result must agree with.
fn scan_range(
    entries: &[i64],
    schedule: &Schedule,
    stream: &RandomStream,
    from: u64,
    to: u64,
) -> Option<u64> {
    crate::annealer::scan_accepting(entries, schedule, stream, from, to)
}

fn require_delta<'s, 'a>(state: &'s SolverState<'a>) -> Result<&'s [i64]> {
    state
        .delta()
        .map(|d| d.entries())
        .ok_or_else(|| Error::Consistency("delta matrix not initialized for parallel search".into()))
}

/// Evaluates one chunk of `len` proposals starting at `base` across the
/// configured workers and reports the earliest accepting one.
pub fn evaluate_chunk(
    state: &SolverState,
    base: u64,
    len: u64,
    schedule: &Schedule,
    stream: &RandomStream,
    config: &ParallelConfig,
) -> Result<ChunkVerdict> {
    config.validate()?;
    let entries = require_delta(state)?;
    let pairs = PairTable::new(state.instance().n());
    let workers = config.workers.min(len.max(1) as usize);

    // Workers also count every accepting proposal in their share; the paper's
    // subset search evaluates the whole subset at once, so the count comes
    // for free there and is kept here as a diagnostic.
    let scan_and_count = |range: Range<u64>| {
        let mut first = None;
        let mut count = 0usize;
        let mut cursor = range.start;
        while let Some(k) = scan_range(entries, schedule, stream, cursor, range.end) {
            first.get_or_insert(k);
            count += 1;
            cursor = k + 1;
        }
        (first, count)
    };

    let mut results: Vec<(Option<u64>, usize)> = Vec::with_capacity(workers);
    if workers == 1 {
        results.push(scan_and_count(base..base + len));
    } else {
        let scan_and_count = &scan_and_count;
        std::thread::scope(|scope| {
            let handles: Vec<_> = (1..workers)
                .map(|w| scope.spawn(move || scan_and_count(split_span(base, len, workers, w))))
                .collect();
            results.push(scan_and_count(split_span(base, len, workers, 0)));
            for handle in handles {
                results.push(handle.join().expect("search worker panicked"));
            }
        });
    }

    let accepted_in_chunk = results.iter().map(|(_, c)| c).sum();
    let first = results.iter().filter_map(|(k, _)| *k).min();
    Ok(match first {
        Some(k) => ChunkVerdict {
            found: true,
            pair: Some(pairs.get((k % pairs.len() as u64) as usize)),
            iteration: k,
            accepted_in_chunk,
        },
        None => ChunkVerdict {
            found: false,
            pair: None,
            iteration: base + len,
            accepted_in_chunk,
        },
    })
}

/// Searches forward from proposal index `cursor` for the next accepting swap,
/// chunk by chunk, never looking past `budget_end`. The result is identical
/// to a sequential scan of the same proposal sequence.
pub fn parallel_search(
    state: &SolverState,
    cursor: u64,
    budget_end: u64,
    schedule: &Schedule,
    stream: &RandomStream,
    config: &ParallelConfig,
) -> Result<SearchOutcome> {
    config.validate()?;
    require_delta(state)?;
    let mut base = cursor;
    while base < budget_end {
        let len = (budget_end - base).min(config.chunk_size as u64);
        let verdict = evaluate_chunk(state, base, len, schedule, stream, config)?;
        if verdict.found {
            return Ok(SearchOutcome::Accepted {
                pair: verdict.pair.expect("found chunk carries a pair"),
                iteration: verdict.iteration,
                next_cursor: verdict.iteration + 1,
            });
        }
        base += len;
    }
    Ok(SearchOutcome::Exhausted {
        proposals: budget_end - cursor,
    })
}

/// Applies the delta-matrix update for an accepted swap across workers, each
/// rewriting a contiguous range of at least `elems_per_worker` entries.
/// Entry-for-entry equal to the sequential
/// [`update_delta_matrix`](SolverState::update_delta_matrix).
pub fn parallel_update_delta(
    state: &mut SolverState,
    r: usize,
    s: usize,
    snap: &SwapSnapshot,
    config: &ParallelConfig,
) -> Result<()> {
    config.validate()?;
    if snap.pair() != (r.min(s), r.max(s)) && snap.pair() != (r, s) {
        let (snap_r, snap_s) = snap.pair();
        return Err(Error::SnapshotMismatch {
            snap_r,
            snap_s,
            r,
            s,
        });
    }
    let mut delta = state.take_delta().ok_or_else(|| {
        Error::Consistency("parallel_update_delta called before init_delta_matrix".into())
    })?;
    let n = state.instance().n();
    let entries = delta.entries_mut();
    let workers = config.effective_workers(entries.len());

    if workers == 1 {
        update_delta_range(
            state.instance().a(),
            state.bprime(),
            n,
            r,
            s,
            snap,
            entries,
            0,
            state.shadow(),
        );
    } else {
        let ranges = update_ranges(entries.len(), workers);
        std::thread::scope(|scope| {
            let mut rest = entries;
            let mut consumed = 0usize;
            for range in &ranges {
                let (mine, tail) = rest.split_at_mut(range.len());
                rest = tail;
                let start = consumed;
                consumed += range.len();
                let (a, bprime) = (state.instance().a(), state.bprime());
                let shadow = state.shadow();
                scope.spawn(move || {
                    update_delta_range(a, bprime, n, r, s, snap, mine, start, shadow);
                });
            }
        });
    }
    state.put_delta(delta);
    Ok(())
}

// ---------------------------------------------------------------------------
// Persistent-worker engine
// ---------------------------------------------------------------------------

/// Reusable all-worker barrier. Spins briefly, then yields, so it degrades
/// gracefully when workers outnumber cores.
struct SpinBarrier {
    total: usize,
    count: AtomicUsize,
    generation: AtomicUsize,
}

impl SpinBarrier {
    fn new(total: usize) -> Self {
        Self {
            total,
            count: AtomicUsize::new(0),
            generation: AtomicUsize::new(0),
        }
    }

    fn wait(&self) {
        if self.total == 1 {
            return;
        }
        let generation = self.generation.load(Ordering::Acquire);
        if self.count.fetch_add(1, Ordering::AcqRel) + 1 == self.total {
            self.count.store(0, Ordering::Relaxed);
            self.generation.fetch_add(1, Ordering::Release);
        } else {
            let mut spins = 0u32;
            while self.generation.load(Ordering::Acquire) == generation {
                spins = spins.wrapping_add(1);
                if spins < 128 {
                    std::hint::spin_loop();
                } else {
                    std::thread::yield_now();
                }
            }
        }
    }
}

/// Interior-mutable slot shared across workers. All access is phase
/// disciplined: the orchestrator writes only while every other worker is
/// parked at the phase-start barrier, and workers only read during a phase.
struct SharedCell<T>(UnsafeCell<T>);

unsafe impl<T: Send> Sync for SharedCell<T> {}

impl<T> SharedCell<T> {
    fn new(value: T) -> Self {
        Self(UnsafeCell::new(value))
    }

    /// Caller must uphold the phase discipline described above.
    #[allow(clippy::mut_from_ref)]
    unsafe fn get(&self) -> &mut T {
        &mut *self.0.get()
    }

}

/// Raw view of the delta entries buffer. The owning `Vec` lives on the
/// orchestrator's stack for the whole run and is never resized, so the
/// pointer stays valid; disjointness of worker ranges plus the barriers make
/// the accesses race free.
#[derive(Clone, Copy)]
struct DeltaBuf {
    ptr: *mut i64,
    len: usize,
}

unsafe impl Send for DeltaBuf {}
unsafe impl Sync for DeltaBuf {}

impl DeltaBuf {
    /// Shared read view. Valid during search phases, when nobody writes.
    unsafe fn as_slice<'a>(&self) -> &'a [i64] {
        std::slice::from_raw_parts(self.ptr, self.len)
    }

    /// Exclusive view of one range. Valid during update phases, where each
    /// worker touches only its own range.
    unsafe fn range_mut<'a>(&self, range: &Range<usize>) -> &'a mut [i64] {
        std::slice::from_raw_parts_mut(self.ptr.add(range.start), range.len())
    }
}

#[derive(Clone, Copy)]
enum Phase {
    Search { base: u64, len: u64 },
    Update { r: usize, s: usize },
    Done,
}

struct EngineCtx<'run, 'inst> {
    instance: &'inst Instance,
    pairs: PairTable,
    schedule: Schedule,
    stream: RandomStream,
    workers: usize,
    chunk_size: u64,
    update_parts: Vec<Range<usize>>,
    barrier: SpinBarrier,
    phase: SharedCell<Phase>,
    state: SharedCell<SolverState<'inst>>,
    snapshot: SharedCell<Option<SwapSnapshot>>,
    delta: DeltaBuf,
    /// Per-worker first accepting proposal index of the current chunk;
    /// `u64::MAX` means none.
    found: Vec<AtomicU64>,
    _marker: std::marker::PhantomData<&'run ()>,
}

impl EngineCtx<'_, '_> {
    /// One phase of work for worker `w`. Runs strictly between the
    /// phase-start and phase-end barriers.
    fn run_phase(&self, w: usize, phase: Phase) {
        match phase {
            Phase::Done => {}
            Phase::Search { base, len } => {
                let span = split_span(base, len, self.workers, w);
                let entries = unsafe { self.delta.as_slice() };
                let hit = scan_range(
                    entries,
                    &self.schedule,
                    &self.stream,
                    span.start,
                    span.end,
                );
                self.found[w].store(hit.unwrap_or(u64::MAX), Ordering::Release);
            }
            Phase::Update { r, s } => {
                if let Some(range) = self.update_parts.get(w) {
                    let state = unsafe { &*self.state.0.get() };
                    let snap = unsafe { &*self.snapshot.0.get() };
                    let snap = snap.as_ref().expect("snapshot set before update phase");
                    let mine = unsafe { self.delta.range_mut(range) };
                    update_delta_range(
                        self.instance.a(),
                        state.bprime(),
                        self.instance.n(),
                        r,
                        s,
                        snap,
                        mine,
                        range.start,
                        state.shadow(),
                    );
                }
            }
        }
    }

    fn worker_loop(&self, w: usize) {
        loop {
            self.barrier.wait();
            let phase = *unsafe { self.phase.get() };
            if matches!(phase, Phase::Done) {
                return;
            }
            self.run_phase(w, phase);
            self.barrier.wait();
        }
    }
}

/// Runs the data-parallel annealer. Output (accepted-swap sequence, final
/// permutation, costs, acceptance rate) is bit-identical to sequential
/// [`anneal`] in delta mode with the same parameters, for any worker count.
///
/// [`anneal`]: crate::annealer::anneal
pub fn anneal_parallel(
    instance: &Instance,
    params: &AnnealParams,
    config: &ParallelConfig,
) -> Result<RunStats> {
    let started = Instant::now();
    config.validate()?;
    if !instance.supports_delta_fast_path() {
        return Err(Error::UnsupportedInstance(
            "the parallel engine requires a symmetric instance with zero diagonals".into(),
        ));
    }
    let (stream, mut state, schedule) = setup_run(instance, params)?;
    state.init_delta_matrix()?;
    let mut delta_entries = state
        .take_delta()
        .expect("delta matrix just initialized")
        .entries()
        .to_vec();

    let workers = config.workers;
    let ctx = EngineCtx {
        instance,
        pairs: PairTable::new(instance.n()),
        schedule,
        stream,
        workers,
        chunk_size: config.chunk_size as u64,
        update_parts: update_ranges(
            delta_entries.len(),
            config.effective_workers(delta_entries.len()),
        ),
        barrier: SpinBarrier::new(workers),
        phase: SharedCell::new(Phase::Search { base: 0, len: 0 }),
        state: SharedCell::new(state),
        snapshot: SharedCell::new(None),
        delta: DeltaBuf {
            ptr: delta_entries.as_mut_ptr(),
            len: delta_entries.len(),
        },
        found: (0..workers).map(|_| AtomicU64::new(u64::MAX)).collect(),
        _marker: std::marker::PhantomData,
    };

    let outcome = std::thread::scope(|scope| -> Result<RunStats> {
        for w in 1..workers {
            let ctx = &ctx;
            scope.spawn(move || ctx.worker_loop(w));
        }
        orchestrate(&ctx, params, started)
    });

    drop(delta_entries);
    outcome
}

/// Orchestrator loop, run on the calling thread, which doubles as worker 0.
/// Between the phase-end barrier and the next phase-start barrier every other
/// worker is parked, so this thread has exclusive access to the shared state.
fn orchestrate(
    ctx: &EngineCtx<'_, '_>,
    params: &AnnealParams,
    started: Instant,
) -> Result<RunStats> {
    let iters = params.iters;
    let chunk_size = ctx.chunk_size;

    let mut next_k = 0u64;
    let mut accepted = 0u64;
    let mut accepted_swaps = Vec::new();
    let state = unsafe { ctx.state.get() };
    let mut best_cost = state.cost();
    let mut best_perm = state.perm().clone();

    loop {
        if next_k >= iters {
            *unsafe { ctx.phase.get() } = Phase::Done;
            ctx.barrier.wait();
            break;
        }
        let len = (iters - next_k).min(chunk_size);
        let phase = Phase::Search { base: next_k, len };
        *unsafe { ctx.phase.get() } = phase;
        ctx.barrier.wait();
        ctx.run_phase(0, phase);
        ctx.barrier.wait();

        // Exclusive zone: reduce the per-worker results.
        let hit = ctx
            .found
            .iter()
            .map(|slot| slot.load(Ordering::Acquire))
            .min()
            .unwrap_or(u64::MAX);

        #[cfg(debug_assertions)]
        {
            // The chunk result must match a plain sequential rescan.
            let entries = unsafe { ctx.delta.as_slice() };
            let oracle = scan_range(
                entries,
                &ctx.schedule,
                &ctx.stream,
                next_k,
                next_k + len,
            );
            debug_assert_eq!(oracle.unwrap_or(u64::MAX), hit);
        }

        if hit == u64::MAX {
            next_k += len;
            continue;
        }

        let (r, s) = ctx.pairs.get((hit % ctx.pairs.len() as u64) as usize);
        let state = unsafe { ctx.state.get() };
        let snap = state.snapshot(r, s)?;
        state.apply_swap(r, s)?;
        *unsafe { ctx.snapshot.get() } = Some(snap);

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

        let phase = Phase::Update { r, s };
        *unsafe { ctx.phase.get() } = phase;
        ctx.barrier.wait();
        ctx.run_phase(0, phase);
        ctx.barrier.wait();

        #[cfg(debug_assertions)]
        if accepted % 1000 == 0 {
            spot_check_delta(ctx);
        }

        next_k = hit + 1;
    }

    let state = unsafe { ctx.state.get() };
    Ok(RunStats {
        iterations: iters,
        accepted,
        acceptance_rate: accepted as f64 / iters as f64,
        best_cost,
        final_cost: state.cost(),
        best_perm,
        final_perm: state.perm().clone(),
        wall_time: started.elapsed(),
        accepted_swaps,
    })
}

#[cfg(debug_assertions)]
fn spot_check_delta(ctx: &EngineCtx<'_, '_>) {
    let state = unsafe { ctx.state.get() };
    let mut fresh = SolverState::new(ctx.instance, state.perm().clone())
        .expect("state permutation is valid");
    fresh
        .init_delta_matrix()
        .expect("engine instance supports the fast path");
    let entries = unsafe { ctx.delta.as_slice() };
    debug_assert_eq!(entries, fresh.delta().expect("just initialized").entries());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annealer::{anneal, Mode};
    use crate::instance::{Matrix, Permutation};
    use crate::io::{generate_taixxa, GeneratorSpec};

    fn tiny3() -> Instance {
        Instance::new(
            Matrix::from_rows(vec![vec![0, 1, 2], vec![1, 0, 3], vec![2, 3, 0]]).unwrap(),
            Matrix::from_rows(vec![vec![0, 4, 5], vec![4, 0, 6], vec![5, 6, 0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn config_defaults_and_effective_workers() {
        let config = ParallelConfig::new(4);
        assert_eq!(config.chunk_size, 64);
        assert_eq!(config.elems_per_worker, 16);
        // n = 3 has 3 pairs: even 64 requested workers collapse to one.
        assert_eq!(ParallelConfig::new(64).effective_workers(3), 1);
        assert_eq!(config.effective_workers(45), 2);
        assert_eq!(config.effective_workers(4950), 4);
        assert!(ParallelConfig {
            workers: 0,
            elems_per_worker: 16,
            chunk_size: 16
        }
        .validate()
        .is_err());
    }

    #[test]
    fn span_partition_covers_everything_once() {
        for (len, parts) in [(10u64, 3usize), (7, 7), (5, 8), (100, 4)] {
            let mut covered = Vec::new();
            for part in 0..parts {
                covered.extend(split_span(100, len, parts, part));
            }
            covered.sort_unstable();
            assert_eq!(covered, (100..100 + len).collect::<Vec<_>>());
        }
    }

    #[test]
    fn chunk_verdict_picks_minimum_accepting_index() {
        // All deltas are negative at the identity of the tiny instance, so
        // the very first proposal accepts no matter the temperature.
        let inst = tiny3();
        let mut state = SolverState::new(&inst, Permutation::identity(3)).unwrap();
        state.init_delta_matrix().unwrap();
        let schedule = Schedule::new(1e-6, 1e-6, 1000).unwrap();
        let stream = RandomStream::new(1);
        let verdict = evaluate_chunk(
            &state,
            0,
            8,
            &schedule,
            &stream,
            &ParallelConfig::new(2),
        )
        .unwrap();
        assert!(verdict.found);
        assert_eq!(verdict.iteration, 0);
        assert_eq!(verdict.pair, Some((0, 1)));
        // Deltas (-2, -8, -2) repeat cyclically: every proposal accepts.
        assert_eq!(verdict.accepted_in_chunk, 8);
    }

    #[test]
    fn zero_instance_always_accepts_first_chunk_index() {
        let zero = Instance::new(Matrix::zeros(4), Matrix::zeros(4)).unwrap();
        let mut state = SolverState::new(&zero, Permutation::identity(4)).unwrap();
        state.init_delta_matrix().unwrap();
        let schedule = Schedule::new(1.0, 0.1, 1000).unwrap();
        let stream = RandomStream::new(3);
        for base in [0u64, 17, 500] {
            let verdict = evaluate_chunk(
                &state,
                base,
                32,
                &schedule,
                &stream,
                &ParallelConfig::new(4),
            )
            .unwrap();
            assert!(verdict.found);
            assert_eq!(verdict.iteration, base);
        }
    }

    #[test]
    fn chunk_results_match_sequential_rescan() {
        let inst = generate_taixxa(&GeneratorSpec::new(12, 8)).unwrap();
        let stream = RandomStream::new(5);
        let perm = Permutation::shuffled(12, &stream);
        let mut state = SolverState::new(&inst, perm).unwrap();
        state.init_delta_matrix().unwrap();
        let schedule = Schedule::new(50.0, 0.5, 100_000).unwrap();
        for workers in [1usize, 2, 3, 8] {
            let config = ParallelConfig::new(workers);
            for base in (0u64..4000).step_by(97) {
                let verdict =
                    evaluate_chunk(&state, base, 64, &schedule, &stream, &config).unwrap();
                let oracle = scan_range(
                    state.delta().unwrap().entries(),
                    &schedule,
                    &stream,
                    base,
                    base + 64,
                );
                match oracle {
                    Some(k) => {
                        assert!(verdict.found, "base {base}, workers {workers}");
                        assert_eq!(verdict.iteration, k);
                    }
                    None => assert!(!verdict.found),
                }
            }
        }
    }

    #[test]
    fn search_reports_budget_exhaustion() {
        // From the reversed permutation the tiny instance is at its optimum:
        // all deltas are positive, and a frozen near-zero temperature rejects
        // every uphill proposal.
        let inst = tiny3();
        let mut state =
            SolverState::new(&inst, Permutation::from_vec(vec![2, 1, 0]).unwrap()).unwrap();
        state.init_delta_matrix().unwrap();
        assert!(state.delta().unwrap().entries().iter().all(|&d| d > 0));
        let schedule = Schedule::new(1e-9, 1e-9, 1_000).unwrap();
        let stream = RandomStream::new(7);
        let outcome = parallel_search(
            &state,
            0,
            100,
            &schedule,
            &stream,
            &ParallelConfig::new(2),
        )
        .unwrap();
        assert_eq!(outcome, SearchOutcome::Exhausted { proposals: 100 });
    }

    #[test]
    fn search_requires_initialized_delta() {
        let inst = tiny3();
        let state = SolverState::new(&inst, Permutation::identity(3)).unwrap();
        let schedule = Schedule::new(1.0, 0.5, 10).unwrap();
        let stream = RandomStream::new(1);
        assert!(matches!(
            parallel_search(&state, 0, 10, &schedule, &stream, &ParallelConfig::new(1)),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn parallel_update_matches_sequential_update() {
        let inst = generate_taixxa(&GeneratorSpec::new(10, 31)).unwrap();
        for workers in [1usize, 4] {
            let mut config = ParallelConfig::new(workers);
            config.elems_per_worker = 8; // 45 pairs: allow more than one range
            let mut par = SolverState::new(&inst, Permutation::identity(10)).unwrap();
            par.init_delta_matrix().unwrap();
            let mut seq = par.clone();
            for &(r, s) in &[(2usize, 7usize), (0, 9), (4, 5)] {
                let snap_par = par.snapshot(r, s).unwrap();
                par.apply_swap(r, s).unwrap();
                parallel_update_delta(&mut par, r, s, &snap_par, &config).unwrap();

                let snap_seq = seq.snapshot(r, s).unwrap();
                seq.apply_swap(r, s).unwrap();
                seq.update_delta_matrix(r, s, &snap_seq).unwrap();

                assert_eq!(
                    par.delta().unwrap().entries(),
                    seq.delta().unwrap().entries(),
                    "workers {workers}, swap ({r},{s})"
                );
            }
        }
    }

    #[test]
    fn parallel_run_is_trace_identical_to_sequential_delta_mode() {
        let inst = generate_taixxa(&GeneratorSpec::new(20, 17)).unwrap();
        let params = AnnealParams::new(20_000, 9).with_mode(Mode::Delta).recording();
        let reference = anneal(&inst, &params).unwrap();
        for workers in [1usize, 2, 4] {
            let stats = anneal_parallel(&inst, &params, &ParallelConfig::new(workers)).unwrap();
            assert!(
                stats.same_trace(&reference),
                "workers {workers}: {} vs {}",
                stats.final_cost,
                reference.final_cost
            );
        }
    }

    #[test]
    fn engine_rejects_bad_inputs() {
        let inst = tiny3();
        let params = AnnealParams::new(10, 1);
        assert!(matches!(
            anneal_parallel(
                &inst,
                &params,
                &ParallelConfig {
                    workers: 0,
                    elems_per_worker: 16,
                    chunk_size: 16
                }
            ),
            Err(Error::Config(_))
        ));
        let asym = Instance::new(
            Matrix::from_rows(vec![vec![0, 1], vec![2, 0]]).unwrap(),
            Matrix::from_rows(vec![vec![0, 3], vec![3, 0]]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            anneal_parallel(&asym, &params, &ParallelConfig::new(2)),
            Err(Error::UnsupportedInstance(_))
        ));
    }

    #[test]
    fn all_zero_instance_accepts_everything_in_parallel() {
        let zero = Instance::new(Matrix::zeros(5), Matrix::zeros(5)).unwrap();
        let stats =
            anneal_parallel(&zero, &AnnealParams::new(500, 2), &ParallelConfig::new(3)).unwrap();
        assert_eq!(stats.final_cost, 0);
        assert_eq!(stats.acceptance_rate, 1.0);
    }
}
