//! Canonical enumeration of facility pairs.
//!
//! Candidates are the upper-triangle pairs in row-major order:
//! `(0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1)`. This single order is
//! shared by the delta matrix layout, the sequential candidate cursor and the
//! parallel chunk search, which is what makes "first accepting swap"
//! well defined everywhere.

/// Number of upper-triangle pairs for problem size `n`.
#[inline(always)]
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Linear index of pair `(r, s)` with `r < s`.
#[inline(always)]
pub fn pair_index(n: usize, r: usize, s: usize) -> usize {
    debug_assert!(r < s && s < n);
    r * (2 * n - r - 1) / 2 + (s - r - 1)
}

/// Pair at linear index `k`. Inverse of [`pair_index`].
pub fn pair_at(n: usize, k: usize) -> (usize, usize) {
    debug_assert!(k < pair_count(n));
    let mut k = k;
    let mut r = 0;
    while k >= n - 1 - r {
        k -= n - 1 - r;
        r += 1;
    }
    (r, r + 1 + k)
}

/// Candidate at `cursor` plus the cyclically advanced cursor.
pub fn next_candidate(n: usize, cursor: usize) -> ((usize, usize), usize) {
    let total = pair_count(n);
    let cursor = cursor % total;
    (pair_at(n, cursor), (cursor + 1) % total)
}

/// Precomputed pair table for O(1) random access in hot loops.
#[derive(Debug, Clone)]
pub struct PairTable {
    pairs: Vec<(u32, u32)>,
}

impl PairTable {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(pair_count(n));
        for r in 0..n {
            for s in r + 1..n {
                pairs.push((r as u32, s as u32));
            }
        }
        Self { pairs }
    }

    #[inline(always)]
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    #[inline(always)]
    pub fn get(&self, k: usize) -> (usize, usize) {
        let (r, s) = self.pairs[k];
        (r as usize, s as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_unrank_are_inverse() {
        for n in 2..20 {
            for k in 0..pair_count(n) {
                let (r, s) = pair_at(n, k);
                assert!(r < s && s < n);
                assert_eq!(pair_index(n, r, s), k);
                assert_eq!(PairTable::new(n).get(k), (r, s));
            }
        }
    }

    #[test]
    fn candidate_order_matches_row_major_enumeration() {
        // n=3: (0,1),(0,2),(1,2) then wrap.
        assert_eq!(next_candidate(3, 0), ((0, 1), 1));
        assert_eq!(next_candidate(3, 2), ((1, 2), 0));
        // n=4: (0,1),(0,2),(0,3),(1,2),...
        assert_eq!(next_candidate(4, 3), ((1, 2), 4));
    }
}
