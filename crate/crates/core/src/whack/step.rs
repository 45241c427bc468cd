//! Single whacks and the closed-form step size of an enforcement.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Direction of the multiplicative update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Weights grow by `1 + eps * C_ij / lambda`.
    Covering,
    /// Weights shrink by `1 - eps * P_ij / lambda`.
    Packing,
}

impl Side {
    /// Per-whack log factor `ln(1 +/- eps * v / lambda)`.
    pub fn log_factor<F: Scalar>(self, v: F, lambda: F, eps: F) -> F {
        match self {
            Side::Covering => (eps * v / lambda).ln_1p(),
            Side::Packing => (-(eps * v / lambda)).ln_1p(),
        }
    }

    /// Whether a row value has been pushed back to the target `1`.
    pub fn reached<F: Scalar>(self, value: F) -> bool {
        match self {
            Side::Covering => value >= F::one(),
            Side::Packing => value <= F::one(),
        }
    }

    /// Whether a phase-relative row value needs enforcing.
    pub fn violated<F: Scalar>(self, value: F, eps: F) -> bool {
        let half = eps / F::c(2.0);
        match self {
            Side::Covering => value < F::one() - half,
            Side::Packing => value > F::one() + half,
        }
    }
}

/// Fig. 2 style whack on covering row `row`: `x_j <- (1 + eps C_ij / lambda) x_j`.
pub fn whack<F: Scalar>(row: &[(usize, F)], x_hat: &mut [F], lambda: F, eps: F) {
    for &(j, v) in row {
        x_hat[j] = x_hat[j] * (F::one() + eps * v / lambda);
    }
}

/// Packing whack: `x_j <- (1 - eps P_ij / lambda) x_j`.
pub fn whack_packing<F: Scalar>(row: &[(usize, F)], x_hat: &mut [F], lambda: F, eps: F) {
    for &(j, v) in row {
        x_hat[j] = x_hat[j] * (F::one() - eps * v / lambda);
    }
}

/// A row term `coef * exp(kappa * log_factor)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<F> {
    pub coef: F,
    pub log_factor: F,
}

fn value_at<F: Scalar>(terms: &[Term<F>], kappa: u64) -> F {
    let k = F::from_u64(kappa).unwrap();
    terms.iter().fold(F::zero(), |acc, t| acc + t.coef * (k * t.log_factor).exp())
}

/// Smallest `kappa` in `[1, cap]` whose row value reaches `1`, or `cap`.
///
/// `terms` hold `C_ij x_j / W` and the per-whack log factor of each nonzero.
pub fn step_size_terms<F: Scalar>(terms: &[Term<F>], cap: u64, side: Side) -> u64 {
    if cap <= 1 || !side.reached(value_at(terms, cap)) {
        return cap.max(1);
    }
    let mut lo = 0u64;
    let mut hi = 1u64;
    while !side.reached(value_at(terms, hi)) {
        lo = hi;
        hi = (hi * 2).min(cap);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if side.reached(value_at(terms, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Step size of enforcing covering row `row` at round `t` of `total`.
///
/// Fails with [`Error::PreconditionViolated`] unless `(C x / W)_i < 1 - eps/2`.
#[allow(clippy::too_many_arguments)]
pub fn step_size<F: Scalar>(
    row_index: usize,
    row: &[(usize, F)],
    x_hat: &[F],
    w: F,
    lambda: F,
    eps: F,
    t: u64,
    total: u64,
) -> Result<u64> {
    let terms: Vec<Term<F>> = row
        .iter()
        .map(|&(j, v)| Term { coef: v * x_hat[j] / w, log_factor: Side::Covering.log_factor(v, lambda, eps) })
        .collect();
    let current = value_at(&terms, 0);
    if !Side::Covering.violated(current, eps) {
        return Err(Error::PreconditionViolated { row: row_index, residual: current.f64() });
    }
    Ok(step_size_terms(&terms, total.saturating_sub(t), Side::Covering))
}
