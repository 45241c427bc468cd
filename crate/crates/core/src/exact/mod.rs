//! Exact rational oracle for desk-scale instances.
//!
//! The primary route is a dense Bland-rule simplex on the packing side;
//! vertex enumeration is an independent second route for tiny instances.

mod brute;
mod enumerate;
mod simplex;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

pub use brute::{brute_force_delta, brute_force_step_size};
pub use enumerate::{enumerate_covering, enumerate_positive};
pub use simplex::{maximize, solve_covering_exact, solve_packing_exact, positive_feasible_exact, Lp};

/// Exact field used by the oracle.
pub trait ExactField:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Signed
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact value of a finite float.
    fn from_float(v: f64) -> Self;
    fn to_float(&self) -> f64;
}

impl ExactField for BigRational {
    fn from_float(v: f64) -> Self {
        BigRational::from_float(v).expect("finite input")
    }

    fn to_float(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| {
            // Fall back to a shifted division for huge numerators/denominators.
            let shift = (self.numer().bits().max(self.denom().bits()) as i64 - 60).max(0) as u32;
            let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }
}

pub type Rational = BigRational;

/// Rational from a ratio of integers.
pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Result of an exact LP solve.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactLpResult<Q> {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

impl<Q: ExactField> ExactLpResult<Q> {
    pub fn value(&self) -> Option<&Q> {
        match self {
            ExactLpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Largest dimension accepted by the oracle.
pub const MAX_DIM: usize = 12;

/// Dense exact copy of a float matrix.
pub fn to_exact<F: Scalar, Q: ExactField>(c: &SparseMatrix<F>) -> Vec<Vec<Q>> {
    let mut d = vec![vec![Q::zero(); c.cols()]; c.rows()];
    for (i, j, v) in c.triplets() {
        d[i][j] = Q::from_float(v.f64());
    }
    d
}

/// Exact copy of a float vector.
pub fn vec_to_exact<F: Scalar, Q: ExactField>(v: &[F]) -> Vec<Q> {
    v.iter().map(|x| Q::from_float(x.f64())).collect()
}
