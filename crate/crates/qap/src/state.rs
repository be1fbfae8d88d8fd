//! Solver state: exact cost evaluation, single-swap deltas, the incremental
//! delta matrix and the permuted distance matrix `B'`.
//!
//! `B'` mirrors the current assignment (`bprime[i][j] = b[p(i)][p(j)]`) so the
//! delta formulas can index it directly; a swap of facilities `r` and `s`
//! turns into exchanging rows `r`/`s` and columns `r`/`s` of `B'`, an O(n)
//! operation.

use crate::error::{Error, Result};
use crate::instance::{Instance, Matrix, Permutation};
use crate::pairs::{pair_at, pair_count, pair_index};

/// Exact cost of an assignment by direct double summation.
pub fn cost(instance: &Instance, perm: &Permutation) -> Result<i64> {
    check_perm(instance, perm)?;
    let n = instance.n();
    let (a, b) = (instance.a(), instance.b());
    let mut total = 0i64;
    for i in 0..n {
        let pi = perm.get(i);
        for j in 0..n {
            total += a.get(i, j) * b.get(pi, perm.get(j));
        }
    }
    Ok(total)
}

/// The distance matrix permuted by the assignment: `m[i][j] = b[p(i)][p(j)]`.
pub fn bprime_of(instance: &Instance, perm: &Permutation) -> Result<Matrix> {
    check_perm(instance, perm)?;
    let n = instance.n();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, instance.b().get(perm.get(i), perm.get(j)));
        }
    }
    Ok(m)
}

fn check_perm(instance: &Instance, perm: &Permutation) -> Result<()> {
    if perm.len() != instance.n() {
        return Err(Error::Dimension(format!(
            "permutation has length {} but instance size is {}",
            perm.len(),
            instance.n()
        )));
    }
    Ok(())
}

/// Cached swap costs for every facility pair, stored as the linearized upper
/// triangle in row-major pair order. `delta[s][r]` is implied by symmetry and
/// the diagonal is implicitly zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl DeltaMatrix {
    fn from_entries(n: usize, entries: Vec<i64>) -> Self {
        debug_assert_eq!(entries.len(), pair_count(n));
        Self { n, entries }
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn get(&self, r: usize, s: usize) -> i64 {
        if r == s {
            return 0;
        }
        let (lo, hi) = (r.min(s), r.max(s));
        self.entries[pair_index(self.n, lo, hi)]
    }

    /// Entry at linear pair index `k` (the enumeration order of `pairs`).
    #[inline(always)]
    pub fn at(&self, k: usize) -> i64 {
        self.entries[k]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [i64] {
        &mut self.entries
    }
}

/// Pre-swap data the delta update needs after the swap has been applied:
/// row differences of `A` and of the pre-swap `B'` for the swapped pair, plus
/// the accepted delta itself.
#[derive(Debug, Clone)]
pub struct SwapSnapshot {
    r: usize,
    s: usize,
    /// `d_a[k] = a[r][k] - a[s][k]`
    d_a: Vec<i64>,
    /// `d_b[k] = bprime_pre[s][k] - bprime_pre[r][k]`
    d_b: Vec<i64>,
    delta_rs: i64,
}

impl SwapSnapshot {
    pub fn pair(&self) -> (usize, usize) {
        (self.r, self.s)
    }

    pub fn delta(&self) -> i64 {
        self.delta_rs
    }

    #[inline(always)]
    pub(crate) fn d_a(&self) -> &[i64] {
        &self.d_a
    }

    #[inline(always)]
    pub(crate) fn d_b(&self) -> &[i64] {
        &self.d_b
    }
}

/// Swap delta on the symmetric zero-diagonal fast path, computed from rows of
/// `A` and the current `B'`:
///
/// `delta = 2 * sum_{k != r,s} (a[r][k] - a[s][k]) * (bprime[s][k] - bprime[r][k])`
///
/// The loop runs over all k; the two excluded terms collapse to
/// `-2 * a[r][s] * bprime[r][s]` under symmetry and zero diagonals, folded in
/// after the loop so the body stays branch-free.
#[inline]
pub(crate) fn scratch_delta_fast(a: &Matrix, bprime: &Matrix, r: usize, s: usize) -> i64 {
    let ar = a.row(r);
    let asr = a.row(s);
    let br = bprime.row(r);
    let bs = bprime.row(s);
    let mut acc = 0i64;
    for k in 0..ar.len() {
        acc += (ar[k] - asr[k]) * (bs[k] - br[k]);
    }
    2 * acc + 4 * ar[s] * br[s]
}

/// Entry bound under which the i32 shadow copies are kept. Diffs then fit in
/// i32 and every row accumulation stays far below i64 range for any instance
/// that fits in memory.
const SHADOW_MAX_ENTRY: i64 = 1 << 20;

/// Narrow copies of `A` and the current `B'`, kept when every instance entry
/// is at most [`SHADOW_MAX_ENTRY`]. The delta update reads these instead of
/// the i64 matrices: the widening i32 * i32 -> i64 products vectorize on
/// baseline x86-64, where plain i64 products do not. Values are identical to
/// the i64 matrices at all times, so results are bit-equal either way.
#[derive(Debug, Clone)]
pub(crate) struct Shadow {
    a: Vec<i32>,
    bprime: Vec<i32>,
    n: usize,
}

impl Shadow {
    fn build(instance: &Instance, bprime: &Matrix) -> Option<Self> {
        let n = instance.n();
        let mut max = 0i64;
        for i in 0..n {
            for m in [instance.a(), instance.b()] {
                for &value in m.row(i) {
                    max = max.max(value);
                }
            }
        }
        if max > SHADOW_MAX_ENTRY {
            return None;
        }
        let flatten = |m: &Matrix| {
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                out.extend(m.row(i).iter().map(|&v| v as i32));
            }
            out
        };
        Some(Self {
            a: flatten(instance.a()),
            bprime: flatten(bprime),
            n,
        })
    }

    fn swap_bprime(&mut self, r: usize, s: usize) {
        let n = self.n;
        for k in 0..n {
            self.bprime.swap(r * n + k, s * n + k);
        }
        for k in 0..n {
            self.bprime.swap(k * n + r, k * n + s);
        }
    }

    pub(crate) fn views(&self) -> (&[i32], &[i32]) {
        (&self.a, &self.bprime)
    }
}

/// [`scratch_delta_fast`] over the i32 shadow; bit-equal results.
#[inline(always)]
fn scratch_delta_fast32(a: &[i32], bprime: &[i32], n: usize, r: usize, s: usize) -> i64 {
    let ar = &a[r * n..(r + 1) * n];
    let asr = &a[s * n..(s + 1) * n];
    let br = &bprime[r * n..(r + 1) * n];
    let bs = &bprime[s * n..(s + 1) * n];
    let mut acc = 0i64;
    for k in 0..n {
        acc += (ar[k] - asr[k]) as i64 * (bs[k] - br[k]) as i64;
    }
    2 * acc + 4 * ar[s] as i64 * br[s] as i64
}

/// Rewrites `entries[..]`, which holds linear pair indices
/// `start .. start + entries.len()` of the delta matrix, to reflect an applied
/// swap of `r` and `s`. `bprime` must already be post-swap. Pairs disjoint
/// from the swap get the O(1) incremental update from the snapshot; pairs
/// touching `r` or `s` are recomputed from scratch. When a shadow is passed
/// the arithmetic runs over it (same integers, vectorizable).
pub(crate) fn update_delta_range(
    a: &Matrix,
    bprime: &Matrix,
    n: usize,
    r: usize,
    s: usize,
    snap: &SwapSnapshot,
    entries: &mut [i64],
    start: usize,
    shadow: Option<&Shadow>,
) {
    if let Some(shadow) = shadow {
        return update_delta_range32(shadow, n, r, s, snap, entries, start);
    }
    update_delta_range64(a, bprime, n, r, s, snap, entries, start)
}

fn update_delta_range64(
    a: &Matrix,
    bprime: &Matrix,
    n: usize,
    r: usize,
    s: usize,
    snap: &SwapSnapshot,
    entries: &mut [i64],
    start: usize,
) {
    let end = start + entries.len();
    let (mut u, mut v) = pair_at(n, start);
    let mut i = 0usize;
    while i < entries.len() {
        let k_global = start + i;
        let row_end = pair_index(n, u, n - 1) + 1;
        let seg_len = row_end.min(end) - k_global;
        if u == r || u == s {
            for t in 0..seg_len {
                entries[i + t] = scratch_delta_fast(a, bprime, u, v + t);
            }
        } else {
            let (da, db) = (snap.d_a(), snap.d_b());
            let (dau, dbu) = (da[u], db[u]);
            for t in 0..seg_len {
                let w = v + t;
                entries[i + t] += 2 * (dau - da[w]) * (db[w] - dbu);
            }
            for col in [r, s] {
                if col > u && col >= v && col < v + seg_len {
                    entries[i + (col - v)] = scratch_delta_fast(a, bprime, u, col);
                }
            }
        }
        i += seg_len;
        u += 1;
        v = u + 1;
    }
}

/// [`update_delta_range`] over the i32 shadow. Dispatches to an AVX2-enabled
/// instantiation when the CPU has it: the widening i32 products then compile
/// to `vpmuldq`, which the baseline target (SSE2) lacks. Both instantiations
/// run the same code, so results are identical.
fn update_delta_range32(
    shadow: &Shadow,
    n: usize,
    r: usize,
    s: usize,
    snap: &SwapSnapshot,
    entries: &mut [i64],
    start: usize,
) {
    #[cfg(target_arch = "x86_64")]
    {
        #[target_feature(enable = "avx2")]
        unsafe fn avx2(
            shadow: &Shadow,
            n: usize,
            r: usize,
            s: usize,
            snap: &SwapSnapshot,
            entries: &mut [i64],
            start: usize,
        ) {
            update_delta_range32_impl(shadow, n, r, s, snap, entries, start)
        }
        if std::arch::is_x86_feature_detected!("avx2") {
            // Safety: feature presence checked at runtime just above.
            return unsafe { avx2(shadow, n, r, s, snap, entries, start) };
        }
    }
    update_delta_range32_impl(shadow, n, r, s, snap, entries, start)
}

#[inline(always)]
fn update_delta_range32_impl(
    shadow: &Shadow,
    n: usize,
    r: usize,
    s: usize,
    snap: &SwapSnapshot,
    entries: &mut [i64],
    start: usize,
) {
    let (a32, b32) = shadow.views();
    // Snapshot diffs fit in i32 by the shadow entry bound.
    let da: Vec<i32> = snap.d_a().iter().map(|&v| v as i32).collect();
    let db: Vec<i32> = snap.d_b().iter().map(|&v| v as i32).collect();
    let end = start + entries.len();
    let (mut u, mut v) = pair_at(n, start);
    let mut i = 0usize;
    while i < entries.len() {
        let k_global = start + i;
        let row_end = pair_index(n, u, n - 1) + 1;
        let seg_len = row_end.min(end) - k_global;
        if u == r || u == s {
            for t in 0..seg_len {
                entries[i + t] = scratch_delta_fast32(a32, b32, n, u, v + t);
            }
        } else {
            let (dau, dbu) = (da[u], db[u]);
            for t in 0..seg_len {
                let w = v + t;
                entries[i + t] += 2 * ((dau - da[w]) as i64 * (db[w] - dbu) as i64);
            }
            for col in [r, s] {
                if col > u && col >= v && col < v + seg_len {
                    entries[i + (col - v)] = scratch_delta_fast32(a32, b32, n, u, col);
                }
            }
        }
        i += seg_len;
        u += 1;
        v = u + 1;
    }
}

/// Mutable solver state for one run: the assignment, its permuted distance
/// matrix, the tracked cost and (optionally) the delta matrix.
#[derive(Debug, Clone)]
pub struct SolverState<'a> {
    instance: &'a Instance,
    perm: Permutation,
    bprime: Matrix,
    cost: i64,
    delta: Option<DeltaMatrix>,
    shadow: Option<Shadow>,
}

impl<'a> SolverState<'a> {
    pub fn new(instance: &'a Instance, perm: Permutation) -> Result<Self> {
        let cost = cost(instance, &perm)?;
        let bprime = bprime_of(instance, &perm)?;
        let shadow = Shadow::build(instance, &bprime);
        Ok(Self {
            instance,
            perm,
            bprime,
            cost,
            delta: None,
            shadow,
        })
    }

    pub(crate) fn shadow(&self) -> Option<&Shadow> {
        self.shadow.as_ref()
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn bprime(&self) -> &Matrix {
        &self.bprime
    }

    #[inline(always)]
    pub fn cost(&self) -> i64 {
        self.cost
    }

    pub fn delta(&self) -> Option<&DeltaMatrix> {
        self.delta.as_ref()
    }

    fn check_pair(&self, r: usize, s: usize) -> Result<()> {
        let n = self.instance.n();
        if r == s {
            return Err(Error::InvalidPair(r));
        }
        for index in [r, s] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        Ok(())
    }

    fn check_fast_path(&self) -> Result<()> {
        if !self.instance.supports_delta_fast_path() {
            return Err(Error::UnsupportedInstance(
                "delta fast path requires a symmetric instance with zero diagonals".into(),
            ));
        }
        Ok(())
    }

    /// O(n) swap delta for the symmetric zero-diagonal instance family.
    /// Equals `cost(after swapping r and s) - cost(before)`.
    pub fn swap_delta_scratch(&self, r: usize, s: usize) -> Result<i64> {
        self.check_pair(r, s)?;
        self.check_fast_path()?;
        Ok(scratch_delta_fast(self.instance.a(), &self.bprime, r, s))
    }

    /// O(n) swap delta valid for any instance, symmetric or not. Used by the
    /// scratch solve mode when the fast path does not apply.
    pub fn swap_delta_general(&self, r: usize, s: usize) -> Result<i64> {
        self.check_pair(r, s)?;
        let (a, b, p) = (self.instance.a(), self.instance.b(), &self.perm);
        let n = self.instance.n();
        let (pr, ps) = (p.get(r), p.get(s));
        let mut acc = (a.get(r, r) - a.get(s, s)) * (b.get(ps, ps) - b.get(pr, pr))
            + (a.get(r, s) - a.get(s, r)) * (b.get(ps, pr) - b.get(pr, ps));
        for k in 0..n {
            if k == r || k == s {
                continue;
            }
            let pk = p.get(k);
            acc += (a.get(r, k) - a.get(s, k)) * (b.get(ps, pk) - b.get(pr, pk))
                + (a.get(k, r) - a.get(k, s)) * (b.get(pk, ps) - b.get(pk, pr));
        }
        Ok(acc)
    }

    /// Swap delta via the fastest applicable exact route.
    pub fn swap_delta(&self, r: usize, s: usize) -> Result<i64> {
        if self.instance.supports_delta_fast_path() {
            self.swap_delta_scratch(r, s)
        } else {
            self.swap_delta_general(r, s)
        }
    }

    /// Populates the delta matrix from scratch. O(n^3).
    pub fn init_delta_matrix(&mut self) -> Result<()> {
        self.check_fast_path()?;
        let n = self.instance.n();
        let mut entries = Vec::with_capacity(pair_count(n));
        for r in 0..n {
            for s in r + 1..n {
                entries.push(scratch_delta_fast(self.instance.a(), &self.bprime, r, s));
            }
        }
        self.delta = Some(DeltaMatrix::from_entries(n, entries));
        Ok(())
    }

    /// Captures the pre-swap data needed by [`update_delta_matrix`]
    /// (O(n) copies of the relevant row differences).
    ///
    /// [`update_delta_matrix`]: SolverState::update_delta_matrix
    pub fn snapshot(&self, r: usize, s: usize) -> Result<SwapSnapshot> {
        self.check_pair(r, s)?;
        self.check_fast_path()?;
        let n = self.instance.n();
        let a = self.instance.a();
        let mut d_a = Vec::with_capacity(n);
        let mut d_b = Vec::with_capacity(n);
        for k in 0..n {
            d_a.push(a.get(r, k) - a.get(s, k));
            d_b.push(self.bprime.get(s, k) - self.bprime.get(r, k));
        }
        let delta_rs = match &self.delta {
            Some(delta) => delta.get(r, s),
            None => scratch_delta_fast(a, &self.bprime, r, s),
        };
        Ok(SwapSnapshot {
            r,
            s,
            d_a,
            d_b,
            delta_rs,
        })
    }

    /// Applies the swap of facilities `r` and `s`: exchanges the permutation
    /// entries, exchanges rows and columns `r`/`s` of `B'` and adds the
    /// pre-swap delta to the tracked cost. Returns the applied delta.
    ///
    /// Does not touch the delta matrix; in delta mode the caller follows up
    /// with [`update_delta_matrix`](SolverState::update_delta_matrix).
    pub fn apply_swap(&mut self, r: usize, s: usize) -> Result<i64> {
        self.check_pair(r, s)?;
        let delta = match &self.delta {
            Some(matrix) => matrix.get(r, s),
            None => self.swap_delta(r, s)?,
        };
        self.perm.swap(r, s);
        self.bprime.swap_rows(r, s);
        self.bprime.swap_cols(r, s);
        if let Some(shadow) = &mut self.shadow {
            shadow.swap_bprime(r, s);
        }
        self.cost += delta;
        Ok(delta)
    }

    /// Brings the delta matrix in line with the state after `apply_swap(r, s)`,
    /// using the pre-swap snapshot. Disjoint pairs cost O(1) each; the 2n-3
    /// pairs touching `r` or `s` are recomputed in O(n) each.
    pub fn update_delta_matrix(&mut self, r: usize, s: usize, snap: &SwapSnapshot) -> Result<()> {
        self.check_pair(r, s)?;
        if snap.pair() != (r.min(s), r.max(s)) && snap.pair() != (r, s) {
            let (snap_r, snap_s) = snap.pair();
            return Err(Error::SnapshotMismatch {
                snap_r,
                snap_s,
                r,
                s,
            });
        }
        let delta = self.delta.as_mut().ok_or_else(|| {
            Error::Consistency("update_delta_matrix called before init_delta_matrix".into())
        })?;
        let n = self.instance.n();
        update_delta_range(
            self.instance.a(),
            &self.bprime,
            n,
            r,
            s,
            snap,
            delta.entries_mut(),
            0,
            self.shadow.as_ref(),
        );
        Ok(())
    }

    /// Detaches the delta matrix so callers can update disjoint ranges of it
    /// while reading the rest of the state. Pair with
    /// [`put_delta`](SolverState::put_delta).
    pub fn take_delta(&mut self) -> Option<DeltaMatrix> {
        self.delta.take()
    }

    pub fn put_delta(&mut self, delta: DeltaMatrix) {
        debug_assert_eq!(delta.n(), self.instance.n());
        self.delta = Some(delta);
    }
}
