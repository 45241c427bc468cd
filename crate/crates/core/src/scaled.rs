//! Weight vectors stored as mantissas sharing one power-of-two exponent.
//!
//! The value of coordinate `j` is `mant[j] * 2^exp`. The exponent is moved
//! whenever the mantissa sum leaves `[2^-32, 2^32]`, so sums of very large
//! or very small weights stay representable.

use crate::scalar::Scalar;

const RENORM_LOG2: i32 = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledWeights<F> {
    mant: Vec<F>,
    exp: i32,
    sum: F,
}

impl<F: Scalar> ScaledWeights<F> {
    /// `n` weights equal to `value`.
    pub fn filled(n: usize, value: F) -> Self {
        let mut w = Self { mant: vec![value; n], exp: 0, sum: F::zero() };
        w.resum();
        w
    }

    pub fn len(&self) -> usize {
        self.mant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mant.is_empty()
    }

    pub fn mantissas(&self) -> &[F] {
        &self.mant
    }

    pub fn mantissa(&self, j: usize) -> F {
        self.mant[j]
    }

    pub fn exponent(&self) -> i32 {
        self.exp
    }

    /// Sum of mantissas; the norm is `sum_mantissa() * 2^exponent()`.
    pub fn sum_mantissa(&self) -> F {
        self.sum
    }

    /// Natural log of the absolute value of coordinate `j`.
    pub fn ln_value(&self, j: usize) -> F {
        self.mant[j].ln() + F::of(2).ln() * F::from_i32(self.exp).unwrap()
    }

    /// Natural log of the 1-norm.
    pub fn ln_norm(&self) -> F {
        self.sum.ln() + F::of(2).ln() * F::from_i32(self.exp).unwrap()
    }

    /// Multiplies coordinate `j` by `factor` and returns the mantissa change.
    pub fn scale(&mut self, j: usize, factor: F) -> F {
        let old = self.mant[j];
        let new = old * factor;
        self.mant[j] = new;
        let delta = new - old;
        self.sum = self.sum + delta;
        delta
    }

    /// Recomputes the mantissa sum from scratch.
    pub fn resum(&mut self) {
        self.sum = self.mant.iter().fold(F::zero(), |a, &b| a + b);
    }

    /// Moves the exponent if the mantissa sum drifted out of range.
    ///
    /// Returns the power of two `k` by which all mantissas were multiplied
    /// (`2^k`), so callers can rescale quantities kept in the mantissa frame.
    pub fn renormalize(&mut self) -> Option<i32> {
        let lo = F::pow2(-RENORM_LOG2);
        let hi = F::pow2(RENORM_LOG2);
        if self.sum >= lo && self.sum <= hi {
            return None;
        }
        let k = -self.sum.log2().round().to_i32().unwrap_or(0);
        if k == 0 {
            return None;
        }
        let f = F::pow2(k);
        for m in &mut self.mant {
            *m = *m * f;
        }
        self.exp -= k;
        self.resum();
        Some(k)
    }

    /// `x / ||x||_1`.
    pub fn normalized(&self) -> Vec<F> {
        self.mant.iter().map(|&m| m / self.sum).collect()
    }

    /// `x / W` where `w` is the anchor in the mantissa frame.
    pub fn relative_to(&self, w: F) -> Vec<F> {
        self.mant.iter().map(|&m| m / w).collect()
    }

    /// Absolute values as `f64`, saturating to infinity when out of range.
    pub fn values_f64(&self) -> Vec<f64> {
        let s = 2f64.powi(self.exp);
        self.mant.iter().map(|m| m.f64() * s).collect()
    }

    /// Appends a coordinate with absolute value `value`.
    pub fn push(&mut self, value: F) {
        let m = value * F::pow2(-self.exp);
        self.mant.push(m);
        self.sum = self.sum + m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scale_tracks_sum() {
        let mut w = ScaledWeights::filled(3, 1.0f64);
        let d = w.scale(1, 1.5);
        assert_eq!(d, 0.5);
        assert_eq!(w.sum_mantissa(), 3.5);
        assert_eq!(w.normalized()[1], 1.5 / 3.5);
    }

    #[test]
    fn renormalize_keeps_values() {
        let mut w = ScaledWeights::filled(2, 1.0f64);
        w.scale(0, 2f64.powi(40));
        let before = w.ln_norm();
        let k = w.renormalize().unwrap();
        assert_eq!(k, -40);
        assert!((w.ln_norm() - before).abs() < 1e-12);
        assert_eq!(w.values_f64()[0], 2f64.powi(40));
    }

    #[test]
    fn f32_survives_huge_growth() {
        let mut w = ScaledWeights::filled(1, 1.0f32);
        for _ in 0..20 {
            w.scale(0, 1e10);
            w.renormalize();
        }
        assert!((w.ln_value(0) - 200.0 * 10f32.ln()).abs() < 1e-2);
        assert!(w.mantissa(0).is_finite());
    }

    proptest! {
        #[test]
        fn normalized_sums_to_one(factors in prop::collection::vec((0usize..5, 0.5f64..1e6), 1..50)) {
            let mut w = ScaledWeights::filled(5, 1.0f64);
            for (j, f) in factors {
                w.scale(j, f);
                w.renormalize();
            }
            w.resum();
            let s: f64 = w.normalized().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
