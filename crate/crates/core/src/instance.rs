//! Instance types and their validation.

use crate::error::Error;
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

/// Problem-1 style instance: a matrix with entries in `[0, lambda]`.
///
/// The same shape serves the covering template (`Cx >= 1`) and the packing
/// template (`Px <= 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedInstance<F> {
    pub matrix: SparseMatrix<F>,
    pub lambda: F,
    pub eps: F,
}

/// `min a^T x` subject to `C x >= b`, `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralInstance<F> {
    pub c: SparseMatrix<F>,
    pub a: Vec<F>,
    pub b: Vec<F>,
    /// Lower bound on every nonzero of `C`, `a`, `b`.
    pub lo: F,
    /// Upper bound on every nonzero of `C`, `a`, `b`.
    pub hi: F,
}

/// Feasibility of `P x <= 1`, `C x >= 1`, `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveInstance<F> {
    pub p: SparseMatrix<F>,
    pub c: SparseMatrix<F>,
    pub lo: F,
    pub hi: F,
    pub eps: F,
}

/// Largest `eps` for which the positive-LP guarantees are claimed.
pub const POSITIVE_EPS_MAX: f64 = 1.0 / 200.0;

fn check_eps<F: Scalar>(eps: F, max: F, strict: bool, range: &'static str, errs: &mut Vec<Error>) {
    let bad = !(eps > F::zero()) || if strict { eps >= max } else { eps > max };
    if bad {
        errs.push(Error::EpsOutOfRange { eps: eps.f64(), range });
    }
}

fn finish(errs: Vec<Error>) -> Result<(), Vec<Error>> {
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

impl<F: Scalar> NormalizedInstance<F> {
    pub fn new(matrix: SparseMatrix<F>, lambda: F, eps: F) -> Self {
        Self { matrix, lambda, eps }
    }

    /// Uses the largest entry (or 1 for an all-zero matrix) as `lambda`.
    pub fn with_tight_lambda(matrix: SparseMatrix<F>, eps: F) -> Self {
        let mx = matrix.max_entry();
        let lambda = if mx > F::zero() { mx } else { F::one() };
        Self { matrix, lambda, eps }
    }

    pub fn validate(&self) -> Result<(), Vec<Error>> {
        let mut errs = Vec::new();
        if self.matrix.rows() == 0 || self.matrix.cols() == 0 {
            errs.push(Error::EmptyMatrix);
        }
        if !(self.lambda > F::zero()) || !self.lambda.is_finite() {
            errs.push(Error::InvalidValue { what: "lambda", value: self.lambda.f64() });
        }
        check_eps(self.eps, F::c(0.5), true, "(0, 1/2)", &mut errs);
        for (i, j, v) in self.matrix.triplets() {
            if v > self.lambda {
                errs.push(Error::EntryAboveLambda {
                    row: i,
                    col: j,
                    value: v.f64(),
                    lambda: self.lambda.f64(),
                });
            }
        }
        finish(errs)
    }
}

impl<F: Scalar> GeneralInstance<F> {
    /// Builds an instance whose `[lo, hi]` bounds are read off the data.
    pub fn with_data_bounds(c: SparseMatrix<F>, a: Vec<F>, b: Vec<F>) -> Self {
        let vals = c.triplets().map(|t| t.2).chain(a.iter().copied()).chain(b.iter().copied());
        let (lo, hi) = vals
            .filter(|v| *v > F::zero())
            .fold((F::infinity(), F::zero()), |(l, h), v| (l.min(v), h.max(v)));
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (F::one(), F::one()) };
        Self { c, a, b, lo, hi }
    }

    pub fn validate(&self) -> Result<(), Vec<Error>> {
        let mut errs = Vec::new();
        if self.c.rows() == 0 || self.c.cols() == 0 {
            errs.push(Error::EmptyMatrix);
        }
        if self.a.len() != self.c.cols() {
            errs.push(Error::InvalidValue { what: "length of a", value: self.a.len() as f64 });
        }
        if self.b.len() != self.c.rows() {
            errs.push(Error::InvalidValue { what: "length of b", value: self.b.len() as f64 });
        }
        if !(self.lo > F::zero()) || self.lo > self.hi {
            errs.push(Error::InvalidValue { what: "bounds L <= U", value: self.lo.f64() });
        }
        for (which, v) in [("a", &self.a), ("b", &self.b)] {
            for (k, &x) in v.iter().enumerate() {
                if !(x > F::zero()) {
                    errs.push(Error::ZeroScaleFactor { which, index: k });
                } else if x < self.lo || x > self.hi {
                    errs.push(Error::InvalidValue { what: which, value: x.f64() });
                }
            }
        }
        for (i, j, v) in self.c.triplets() {
            if v < self.lo || v > self.hi {
                errs.push(Error::EntryAboveLambda {
                    row: i,
                    col: j,
                    value: v.f64(),
                    lambda: self.hi.f64(),
                });
            }
        }
        finish(errs)
    }
}

impl<F: Scalar> PositiveInstance<F> {
    /// Builds an instance whose `[lo, hi]` bounds are read off the data.
    pub fn with_data_bounds(p: SparseMatrix<F>, c: SparseMatrix<F>, eps: F) -> Self {
        let (lo, hi) = p
            .triplets()
            .chain(c.triplets())
            .fold((F::infinity(), F::zero()), |(l, h), t| (l.min(t.2), h.max(t.2)));
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (F::one(), F::one()) };
        Self { p, c, lo, hi, eps }
    }

    /// The encoding `1^T x <= 1`, `C x >= 1` of a covering instance.
    pub fn covering_encoding(c: SparseMatrix<F>, eps: F) -> Self {
        let n = c.cols();
        let ones: Vec<_> = (0..n).map(|j| (0, j, F::one())).collect();
        let p = SparseMatrix::from_triplets(1, n, &ones).expect("indices in range");
        Self::with_data_bounds(p, c, eps)
    }

    pub fn n(&self) -> usize {
        self.p.cols()
    }

    pub fn validate(&self) -> Result<(), Vec<Error>> {
        let mut errs = Vec::new();
        if self.p.cols() == 0 || self.p.cols() != self.c.cols() || self.p.rows() + self.c.rows() == 0 {
            errs.push(Error::EmptyMatrix);
        }
        check_eps(self.eps, F::c(POSITIVE_EPS_MAX), false, "(0, 1/200]", &mut errs);
        if !(self.lo > F::zero()) || self.lo > self.hi {
            errs.push(Error::InvalidValue { what: "bounds L <= U", value: self.lo.f64() });
        }
        finish(errs)
    }
}
