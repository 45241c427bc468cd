//! Constraint weights `exp(+-eta * dot)` held relative to a moving shift.
//!
//! A stored value `v` stands for `v * exp(shift)`. Callers holding other
//! values in the same frame must rescale them by the factor returned when
//! the frame moves.

use crate::scalar::Scalar;

/// Frame moves once the total leaves `[exp(-RANGE), exp(RANGE)]`.
const RANGE: f64 = 200.0;
/// A covering total that falls below this fraction of its last exact sum is resummed.
const RESUM: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct SideWeights<F> {
    coef: F,
    dots: Vec<F>,
    shift: F,
    total: F,
    resum_below: F,
}

impl<F: Scalar> SideWeights<F> {
    /// Weights `exp(coef * dots_i)`; `coef = eta` for packing rows and `-eta` for covering rows.
    pub fn new(dots: Vec<F>, coef: F) -> Self {
        let shift = dots.iter().map(|&d| coef * d).fold(F::neg_infinity(), F::max);
        let shift = if shift.is_finite() { shift } else { F::zero() };
        let mut s = Self { coef, dots, shift, total: F::zero(), resum_below: F::zero() };
        s.resum();
        s
    }

    pub fn len(&self) -> usize {
        self.dots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dots.is_empty()
    }

    pub fn dot(&self, i: usize) -> F {
        self.dots[i]
    }

    pub fn dots(&self) -> &[F] {
        &self.dots
    }

    pub fn shift(&self) -> F {
        self.shift
    }

    /// Weight of row `i` in the current frame.
    pub fn weight(&self, i: usize) -> F {
        (self.coef * self.dots[i] - self.shift).exp()
    }

    /// Sum of all weights in the current frame.
    pub fn total(&self) -> F {
        self.total
    }

    /// `ln` of the true total.
    pub fn ln_total(&self) -> F {
        self.total.ln() + self.shift
    }

    pub fn exact_total(&self) -> F {
        (0..self.dots.len()).fold(F::zero(), |s, i| s + self.weight(i))
    }

    pub fn resum(&mut self) {
        self.total = self.exact_total();
        self.resum_below = self.total * F::c(RESUM);
    }

    /// Sets row `i`'s dot. Returns `Some(r)` when the frame moved; values
    /// held in this frame must then be multiplied by `r`.
    pub fn set_dot(&mut self, i: usize, d: F) -> Option<F> {
        let old = self.weight(i);
        self.dots[i] = d;
        self.total = self.total + self.weight(i) - old;
        if self.total < self.resum_below || self.total < F::zero() {
            self.resum();
        }
        let lt = self.total.ln();
        (lt.abs() > F::c(RANGE) && lt.is_finite()).then(|| self.rebase())
    }

    /// Moves the frame so the total becomes `1`.
    pub fn rebase(&mut self) -> F {
        let new_shift = self.ln_total();
        let r = (self.shift - new_shift).exp();
        self.shift = new_shift;
        self.resum();
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_moves_keep_true_values() {
        let eta = 500.0f64;
        let mut w = SideWeights::new(vec![0.0, 0.0], eta);
        let before = w.ln_total();
        assert!((before - 2f64.ln()).abs() < 1e-12);
        let r = w.set_dot(0, 1.0).expect("frame moves");
        assert!(r < 1.0);
        assert!((w.ln_total() - (eta + (1.0 + (-eta).exp()).ln())).abs() < 1e-9);
        assert!((w.total() - w.exact_total()).abs() <= 1e-12 * w.total());
    }

    #[test]
    fn covering_weights_shrink_accurately() {
        let eta = 300.0f64;
        let mut w = SideWeights::new(vec![0.0; 3], -eta);
        for step in 1..=40 {
            let d = step as f64 * 0.05;
            for i in 0..3 {
                w.set_dot(i, d + i as f64 * 0.01);
            }
            let rel = (w.total() - w.exact_total()).abs() / w.exact_total();
            assert!(rel < 1e-9, "{rel}");
        }
    }
}
