//! Dual-indexed sparse nonnegative matrix.
//!
//! Every nonzero is stored twice, once in its row list and once in its column
//! list, both kept sorted by the other index. Zero values are never stored.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<F> {
    m: usize,
    n: usize,
    rows: Vec<Vec<(usize, F)>>,
    cols: Vec<Vec<(usize, F)>>,
}

fn upsert<F: Copy>(list: &mut Vec<(usize, F)>, key: usize, value: Option<F>) {
    match (list.binary_search_by_key(&key, |e| e.0), value) {
        (Ok(p), Some(v)) => list[p].1 = v,
        (Ok(p), None) => {
            list.remove(p);
        }
        (Err(p), Some(v)) => list.insert(p, (key, v)),
        (Err(_), None) => {}
    }
}

impl<F: Scalar> SparseMatrix<F> {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n, rows: vec![Vec::new(); m], cols: vec![Vec::new(); n] }
    }

    /// Builds a matrix from `(row, col, value)` triplets; later duplicates win.
    pub fn from_triplets(m: usize, n: usize, entries: &[(usize, usize, F)]) -> Result<Self> {
        let mut a = Self::new(m, n);
        for &(i, j, v) in entries {
            a.check_index(i, j)?;
            if v < F::zero() || !v.is_finite() {
                return Err(Error::NegativeEntry { row: i, col: j, value: v.f64() });
            }
            a.set(i, j, v);
        }
        Ok(a)
    }

    pub fn from_dense(d: &[Vec<F>]) -> Self {
        let m = d.len();
        let n = d.first().map_or(0, |r| r.len());
        let mut a = Self::new(m, n);
        for (i, r) in d.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                a.set(i, j, v);
            }
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn check_index(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.m || j >= self.n {
            return Err(Error::IndexOutOfRange { row: i, col: j, m: self.m, n: self.n });
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        let r = &self.rows[i];
        match r.binary_search_by_key(&j, |e| e.0) {
            Ok(p) => r[p].1,
            Err(_) => F::zero(),
        }
    }

    /// Stores `v` at `(i, j)`; a zero removes the entry from both indexes.
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        let val = if v > F::zero() { Some(v) } else { None };
        upsert(&mut self.rows[i], j, val);
        upsert(&mut self.cols[j], i, val);
    }

    pub fn row(&self, i: usize) -> &[(usize, F)] {
        &self.rows[i]
    }

    pub fn col(&self, j: usize) -> &[(usize, F)] {
        &self.cols[j]
    }

    /// Appends a row; entries with zero value are dropped.
    pub fn push_row(&mut self, entries: &[(usize, F)]) -> Result<usize> {
        let i = self.m;
        if let Some(&(j, _)) = entries.iter().find(|e| e.0 >= self.n) {
            return Err(Error::IndexOutOfRange { row: i, col: j, m: i + 1, n: self.n });
        }
        self.m += 1;
        self.rows.push(Vec::new());
        for &(j, v) in entries {
            self.set(i, j, v);
        }
        Ok(i)
    }

    /// Iterates over all nonzeros in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, F)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn max_entry(&self) -> F {
        self.triplets().fold(F::zero(), |a, (_, _, v)| a.max(v))
    }

    pub fn min_nonzero(&self) -> Option<F> {
        self.triplets().map(|t| t.2).reduce(F::min)
    }

    /// `C x` computed through the row index.
    pub fn mul(&self, x: &[F]) -> Vec<F> {
        self.rows.iter().map(|r| r.iter().fold(F::zero(), |s, &(j, v)| s + v * x[j])).collect()
    }

    /// `C x` computed through the column index.
    pub fn mul_by_cols(&self, x: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.m];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                out[i] = out[i] + v * x[j];
            }
        }
        out
    }

    /// `C^T y`.
    pub fn tmul(&self, y: &[F]) -> Vec<F> {
        self.cols.iter().map(|c| c.iter().fold(F::zero(), |s, &(i, v)| s + v * y[i])).collect()
    }

    pub fn row_dot(&self, i: usize, x: &[F]) -> F {
        self.rows[i].iter().fold(F::zero(), |s, &(j, v)| s + v * x[j])
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let mut d = vec![vec![F::zero(); self.n]; self.m];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// Applies `f` to every stored value, dropping entries that become zero.
    pub fn map_values(&self, mut f: impl FnMut(usize, usize, F) -> F) -> Self {
        let mut out = Self::new(self.m, self.n);
        for (i, j, v) in self.triplets() {
            out.set(i, j, f(i, j, v));
        }
        out
    }

    /// Checks that both indexes hold the same positive entries.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let mut from_cols: Vec<(usize, usize, F)> = Vec::new();
        for (j, c) in self.cols.iter().enumerate() {
            for w in c.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(format!("column {j} not sorted"));
                }
            }
            from_cols.extend(c.iter().map(|&(i, v)| (i, j, v)));
        }
        from_cols.sort_by_key(|a| (a.0, a.1));
        let from_rows: Vec<_> = self.triplets().collect();
        if from_rows != from_cols {
            return Err("row and column indexes disagree".into());
        }
        if let Some(&(i, j, v)) = from_rows.iter().find(|t| t.2 <= F::zero()) {
            return Err(format!("non-positive stored value {v} at ({i}, {j})"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_and_remove_keep_indexes_in_sync() {
        let mut a = SparseMatrix::<f64>::new(2, 3);
        a.set(0, 2, 1.5);
        a.set(1, 0, 0.5);
        a.set(0, 0, 2.0);
        assert_eq!(a.row(0), &[(0, 2.0), (2, 1.5)]);
        assert_eq!(a.col(0), &[(0, 2.0), (1, 0.5)]);
        a.set(0, 0, 0.0);
        assert_eq!(a.row(0), &[(2, 1.5)]);
        assert_eq!(a.col(0), &[(1, 0.5)]);
        assert!(a.check_consistency().is_ok());
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn negative_triplet_rejected() {
        let e = SparseMatrix::<f64>::from_triplets(1, 1, &[(0, 0, -1.0)]).unwrap_err();
        assert!(matches!(e, Error::NegativeEntry { .. }));
    }

    #[test]
    fn push_row_rejects_bad_column() {
        let mut a = SparseMatrix::<f64>::new(0, 2);
        assert!(a.push_row(&[(0, 1.0), (5, 1.0)]).is_err());
        assert_eq!(a.rows(), 0);
        assert!(a.check_consistency().is_ok());
        assert_eq!(a.push_row(&[(1, 2.0)]).unwrap(), 0);
        assert_eq!(a.col(1), &[(0, 2.0)]);
    }

    fn dense_mul(d: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        d.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    proptest! {
        #[test]
        fn products_agree_with_dense(
            m in 1usize..12, n in 1usize..12,
            seed in proptest::collection::vec((0usize..144, 0.0f64..3.0), 0..60),
            xs in proptest::collection::vec(0.0f64..5.0, 12),
        ) {
            let mut a = SparseMatrix::<f64>::new(m, n);
            for (p, v) in seed {
                let (i, j) = (p % m, (p / m) % n);
                let v = if v < 0.5 { 0.0 } else { v };
                a.set(i, j, v);
            }
            prop_assert!(a.check_consistency().is_ok());
            let x = &xs[..n];
            let dense = dense_mul(&a.to_dense(), x);
            let r = a.mul(x);
            let c = a.mul_by_cols(x);
            for k in 0..m {
                prop_assert!((r[k] - dense[k]).abs() <= 1e-12);
                prop_assert!((c[k] - r[k]).abs() <= 1e-12);
            }
        }
    }
}
