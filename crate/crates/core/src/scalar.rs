//! Scalar abstraction shared by every solver.
//!
//! Solvers are generic over [`Scalar`], which is satisfied by `f32` and `f64`.
//! The exact oracle uses its own field trait in [`crate::exact`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type usable by the approximate solvers.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into `Self`.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }

    /// Converts a count into `Self`.
    fn of(v: usize) -> Self {
        Self::from_usize(v).expect("count representable")
    }

    /// Lossy conversion to `f64` for reporting and oracle input.
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `2^k`, exact for exponents in the normal range.
    fn pow2(k: i32) -> Self {
        Self::c(2.0).powi(k)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Absolute tolerance used by certificate checks.
pub const CHECK_TOL: f64 = 1e-9;

/// Total number of whack rounds `T = ceil(lambda * ln(max(n, 2)) / eps^2)`.
pub fn round_budget<F: Scalar>(n: usize, lambda: F, eps: F) -> u64 {
    let n = F::of(n.max(2));
    let t = (lambda * n.ln() / (eps * eps)).ceil();
    t.to_u64().unwrap_or(u64::MAX).max(1)
}

/// `ln` of the weight cap `max(n, 2)^(1/eps)`.
pub fn ln_weight_cap<F: Scalar>(n: usize, eps: F) -> F {
    F::of(n.max(2)).ln() / eps
}

/// Phase cap `ceil(log_{(1-eps/2)^-1} max(n,2)^(1/eps)) + 1`.
pub fn phase_cap<F: Scalar>(n: usize, eps: F) -> u64 {
    let base = -(F::one() - eps / F::c(2.0)).ln();
    let v = (ln_weight_cap(n, eps) / base).ceil();
    v.to_u64().unwrap_or(u64::MAX).saturating_add(1)
}
