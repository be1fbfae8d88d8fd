//! Problem instances: flow matrix, distance matrix and assignments.

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Dense square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "expected {n} columns, got {}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_flat(n: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    #[inline(always)]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn swap_rows(&mut self, r: usize, s: usize) {
        if r == s {
            return;
        }
        let (lo, hi) = (r.min(s), r.max(s));
        let (head, tail) = self.data.split_at_mut(hi * self.n);
        head[lo * self.n..(lo + 1) * self.n].swap_with_slice(&mut tail[..self.n]);
    }

    pub fn swap_cols(&mut self, r: usize, s: usize) {
        if r == s {
            return;
        }
        for i in 0..self.n {
            self.data.swap(i * self.n + r, i * self.n + s);
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0)
    }

    fn first_negative(&self) -> Option<(usize, usize, i64)> {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if v < 0 {
                    return Some((i, j, v));
                }
            }
        }
        None
    }
}

/// A QAP instance: `a` holds flows between facilities, `b` distances between
/// locations. Entries are non-negative; the symmetry and zero-diagonal flags
/// are computed on construction and decide whether the incremental delta fast
/// path applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    a: Matrix,
    b: Matrix,
    symmetric: bool,
    zero_diagonal: bool,
}

impl Instance {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::Dimension(format!(
                "flow matrix is {0}x{0} but distance matrix is {1}x{1}",
                a.n(),
                b.n()
            )));
        }
        let n = a.n();
        if n < 2 {
            return Err(Error::Size(n));
        }
        for (matrix, name) in [(&a, 'A'), (&b, 'B')] {
            if let Some((row, col, value)) = matrix.first_negative() {
                return Err(Error::NegativeEntry {
                    matrix: name,
                    row,
                    col,
                    value,
                });
            }
        }
        let symmetric = a.is_symmetric() && b.is_symmetric();
        let zero_diagonal = a.has_zero_diagonal() && b.has_zero_diagonal();
        Ok(Self {
            n,
            a,
            b,
            symmetric,
            zero_diagonal,
        })
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn a(&self) -> &Matrix {
        &self.a
    }

    #[inline(always)]
    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn has_zero_diagonal(&self) -> bool {
        self.zero_diagonal
    }

    /// True when the incremental delta formulas apply.
    pub fn supports_delta_fast_path(&self) -> bool {
        self.symmetric && self.zero_diagonal
    }

    /// Number of distinct facility pairs, i.e. the candidate neighborhood size.
    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }
}

/// Assignment of facilities to locations: `p[i]` is the location of facility
/// `i`. Always a bijection on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn from_vec(p: Vec<usize>) -> Result<Self> {
        let n = p.len();
        let mut seen = vec![false; n];
        for &v in &p {
            if v >= n || seen[v] {
                return Err(Error::Dimension(format!(
                    "not a bijection on 0..{n}: offending value {v}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self(p))
    }

    /// Seeded Fisher-Yates shuffle of the identity. Draws use stream indices
    /// `-1, -2, ..., -(n-1)`, reserved below the proposal index range.
    pub fn shuffled(n: usize, stream: &RandomStream) -> Self {
        let mut p: Vec<usize> = (0..n).collect();
        let mut draw = -1i64;
        for i in (1..n).rev() {
            let j = stream.uniform_index(draw, i as u64 + 1) as usize;
            p.swap(i, j);
            draw -= 1;
        }
        Self(p)
    }

    #[inline(always)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline(always)]
    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    #[inline(always)]
    pub fn swap(&mut self, r: usize, s: usize) {
        self.0.swap(r, s);
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny3() -> Instance {
        Instance::new(
            Matrix::from_rows(vec![vec![0, 1, 2], vec![1, 0, 3], vec![2, 3, 0]]).unwrap(),
            Matrix::from_rows(vec![vec![0, 4, 5], vec![4, 0, 6], vec![5, 6, 0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn flags_computed_on_construction() {
        let inst = tiny3();
        assert!(inst.is_symmetric());
        assert!(inst.has_zero_diagonal());
        assert!(inst.supports_delta_fast_path());

        let asym = Instance::new(
            Matrix::from_rows(vec![vec![0, 1], vec![2, 0]]).unwrap(),
            Matrix::from_rows(vec![vec![0, 3], vec![3, 0]]).unwrap(),
        )
        .unwrap();
        assert!(!asym.is_symmetric());
        assert!(asym.has_zero_diagonal());
        assert!(!asym.supports_delta_fast_path());
    }

    #[test]
    fn rejects_negative_entries_and_tiny_sizes() {
        let a = Matrix::from_rows(vec![vec![0, -1], vec![1, 0]]).unwrap();
        let b = Matrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            Instance::new(a, b.clone()),
            Err(Error::NegativeEntry { matrix: 'A', .. })
        ));
        let one = Matrix::from_rows(vec![vec![0]]).unwrap();
        assert!(matches!(
            Instance::new(one.clone(), one),
            Err(Error::Size(1))
        ));
        assert!(matches!(
            Instance::new(b, Matrix::zeros(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn permutation_bijection_check() {
        assert!(Permutation::from_vec(vec![2, 1, 0]).is_ok());
        assert!(Permutation::from_vec(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_vec(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn shuffle_is_deterministic_and_valid() {
        let stream = RandomStream::new(5);
        let p1 = Permutation::shuffled(20, &stream);
        let p2 = Permutation::shuffled(20, &RandomStream::new(5));
        assert_eq!(p1, p2);
        assert!(Permutation::from_vec(p1.as_slice().to_vec()).is_ok());
        let p3 = Permutation::shuffled(20, &RandomStream::new(6));
        assert_ne!(p1, p3);
    }

    #[test]
    fn matrix_row_col_swap() {
        let mut m = Matrix::from_rows(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).unwrap();
        m.swap_rows(0, 2);
        m.swap_cols(0, 2);
        let expect =
            Matrix::from_rows(vec![vec![9, 8, 7], vec![6, 5, 4], vec![3, 2, 1]]).unwrap();
        assert_eq!(m, expect);
    }
}
