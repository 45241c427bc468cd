//! Soft-max and soft-min potentials and coordinate costs, computed with a
//! max shift so that large `eta` never overflows.

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

/// `eta = ln(m_p + m_c + U/L) / eps`.
pub fn eta<F: Scalar>(m_p: usize, m_c: usize, lo: F, hi: F, eps: F) -> F {
    (F::of(m_p + m_c) + hi / lo).ln() / eps
}

/// `ln sum_i exp(a_i)`; `-inf` for an empty sum.
pub fn log_sum_exp<F: Scalar>(a: &[F]) -> F {
    let m = a.iter().copied().fold(F::neg_infinity(), F::max);
    if m == F::neg_infinity() {
        return m;
    }
    m + a.iter().fold(F::zero(), |s, &v| s + (v - m).exp()).ln()
}

/// `(f_p, f_c)` with `f_p = ln(sum_i exp(eta P_i x)) / eta` and
/// `f_c = -ln(sum_j exp(-eta C_j x)) / eta`.
pub fn soft_potentials<F: Scalar>(p: &SparseMatrix<F>, c: &SparseMatrix<F>, x: &[F], eta: F) -> (F, F) {
    let pa: Vec<F> = p.mul(x).into_iter().map(|v| eta * v).collect();
    let ca: Vec<F> = c.mul(x).into_iter().map(|v| -eta * v).collect();
    (log_sum_exp(&pa) / eta, -log_sum_exp(&ca) / eta)
}

/// Column-`k` weighted sums in shifted frames: `(ln num, ln W_p, ln den, ln W_c)`
/// where `num = sum_i w_p(i) P(i,k)` and `den = sum_j w_c(j) C(j,k)`.
fn weighted<F: Scalar>(p: &SparseMatrix<F>, c: &SparseMatrix<F>, x: &[F], eta: F, k: usize) -> (F, F, F, F) {
    let side = |m: &SparseMatrix<F>, s: F| {
        let logs: Vec<F> = m.mul(x).into_iter().map(|v| s * eta * v).collect();
        let shift = logs.iter().copied().fold(F::neg_infinity(), F::max);
        let total = log_sum_exp(&logs);
        let col = m.col(k).iter().fold(F::zero(), |acc, &(i, v)| acc + (logs[i] - shift).exp() * v);
        (col.ln() + shift, total)
    };
    let (num, wp) = side(p, F::one());
    let (den, wc) = side(c, -F::one());
    (num, wp, den, wc)
}

/// `lambda(x, k) = sum_i w_p(x,i) P(i,k) / sum_j w_c(x,j) C(j,k)`.
pub fn coordinate_cost<F: Scalar>(p: &SparseMatrix<F>, c: &SparseMatrix<F>, x: &[F], eta: F, k: usize) -> Result<F> {
    if c.col(k).iter().all(|&(_, v)| v == F::zero()) {
        return Err(Error::UnboundedCost(k));
    }
    let (num, _, den, _) = weighted(p, c, x, eta, k);
    Ok((num - den).exp())
}

/// `lambda(x, k) / lambda_0(x)`, which equals `<grad f_p, e_k> / <grad f_c, e_k>`.
pub fn relative_cost<F: Scalar>(p: &SparseMatrix<F>, c: &SparseMatrix<F>, x: &[F], eta: F, k: usize) -> Result<F> {
    if c.col(k).iter().all(|&(_, v)| v == F::zero()) {
        return Err(Error::UnboundedCost(k));
    }
    let (num, wp, den, wc) = weighted(p, c, x, eta, k);
    Ok((num - wp - den + wc).exp())
}

/// `w_p(x) / w_c(x)`.
pub fn weight_ratio<F: Scalar>(p: &SparseMatrix<F>, c: &SparseMatrix<F>, x: &[F], eta: F) -> F {
    let (fp, fc) = soft_potentials(p, c, x, eta);
    (eta * (fp + fc)).exp()
}
