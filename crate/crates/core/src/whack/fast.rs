//! Phase-based near-linear implementation of the covering template.

use crate::certificate::Outcome;
use crate::instance::NormalizedInstance;
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

use super::engine::{WhackCore, WhackStats};
use super::step::Side;

/// Static solver state: the shared core plus cached row dots `C x_hat` in
/// the mantissa frame.
#[derive(Debug, Clone)]
pub struct WhackState<'a, F> {
    matrix: &'a SparseMatrix<F>,
    core: WhackCore<F>,
    dots: Vec<F>,
}

/// Terminal result of a phase loop, before it is tagged for a template.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Finish<F> {
    Primal(Vec<F>),
    Dual(Vec<F>),
}

impl<'a, F: Scalar> WhackState<'a, F> {
    pub fn new(matrix: &'a SparseMatrix<F>, lambda: F, eps: F, side: Side) -> Self {
        let core = WhackCore::new(side, matrix.cols(), matrix.rows(), lambda, eps);
        let mut s = Self { matrix, core, dots: Vec::new() };
        s.recompute_dots();
        s
    }

    fn recompute_dots(&mut self) {
        self.dots = (0..self.matrix.rows()).map(|i| self.core.row_dot(self.matrix.row(i))).collect();
    }

    pub fn core(&self) -> &WhackCore<F> {
        &self.core
    }

    pub fn record_trace(&mut self) {
        self.core.record_trace();
    }

    /// Cached `(C x_hat / W)_i`.
    pub fn row_ratio(&self, i: usize) -> F {
        self.core.ratio(self.dots[i])
    }

    /// Cached `C x_hat / W` for every row.
    pub fn row_ratios(&self) -> Vec<F> {
        self.dots.iter().map(|&d| self.core.ratio(d)).collect()
    }

    /// Enforces row `i` and propagates the weight change to the row caches.
    pub fn enforce(&mut self, i: usize) -> u64 {
        let (delta, changes) = self.core.enforce(i, self.matrix.row(i));
        for (j, dm) in changes {
            let col = self.matrix.col(j);
            self.core.stats.column_touches += col.len() as u64;
            for &(r, v) in col {
                self.dots[r] = self.dots[r] + v * dm;
            }
        }
        self.dots[i] = self.core.row_dot(self.matrix.row(i));
        if let Some(f) = self.core.renormalize() {
            for d in &mut self.dots {
                *d = *d * f;
            }
        }
        delta
    }

    /// Runs phases until a primal or dual certificate is produced.
    pub(crate) fn run(&mut self) -> Finish<F> {
        let eps = self.core.eps;
        'phase: loop {
            self.core.start_phase();
            self.recompute_dots();
            for i in 0..self.matrix.rows() {
                if !self.core.side.violated(self.row_ratio(i), eps) {
                    continue;
                }
                self.enforce(i);
                if self.core.is_exhausted() {
                    return Finish::Dual(self.core.dual());
                }
                if self.core.phase_ended() {
                    continue 'phase;
                }
            }
            return Finish::Primal(self.core.primal());
        }
    }

    pub fn into_stats(self) -> WhackStats {
        self.core.stats
    }
}

/// Solves the covering template with phases.
pub fn solve_fast<F: Scalar>(inst: &NormalizedInstance<F>) -> (Outcome<F>, WhackStats) {
    solve_fast_traced(inst, false)
}

/// Like [`solve_fast`], optionally recording the `(row, delta)` trace.
pub fn solve_fast_traced<F: Scalar>(inst: &NormalizedInstance<F>, trace: bool) -> (Outcome<F>, WhackStats) {
    let mut state = WhackState::new(&inst.matrix, inst.lambda, inst.eps, Side::Covering);
    if trace {
        state.record_trace();
    }
    let outcome = match state.run() {
        Finish::Primal(x) => Outcome::CoveringPrimal(x),
        Finish::Dual(y) => Outcome::PackingDual(y),
    };
    (outcome, state.into_stats())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{check_certificate, Slack};
    use crate::scalar::phase_cap;

    fn inst(d: &[Vec<f64>], eps: f64) -> NormalizedInstance<f64> {
        NormalizedInstance::new(SparseMatrix::from_dense(d), 1.0, eps)
    }

    #[test]
    fn unit_instance_is_primal() {
        let (o, s) = solve_fast(&inst(&[vec![1.0]], 0.1));
        assert_eq!(o, Outcome::CoveringPrimal(vec![1.0]));
        assert_eq!(s.enforcements, 0);
    }

    #[test]
    fn small_entry_gives_dual() {
        let (o, s) = solve_fast(&inst(&[vec![0.4]], 0.1));
        assert_eq!(o, Outcome::PackingDual(vec![1.0]));
        assert_eq!(s.whacks, crate::scalar::round_budget(1, 1.0, 0.1));
    }

    #[test]
    fn identity_dual_is_near_uniform() {
        let (o, _) = solve_fast(&inst(&[vec![1.0, 0.0], vec![0.0, 1.0]], 0.1));
        let Outcome::PackingDual(y) = o else { panic!("expected dual, got {o:?}") };
        assert!((y[0] - 0.5).abs() < 0.05 && (y[1] - 0.5).abs() < 0.05, "{y:?}");
    }

    #[test]
    fn balanced_row_needs_no_enforcement() {
        let (o, s) = solve_fast(&inst(&[vec![1.0, 1.0]], 0.1));
        assert_eq!(o, Outcome::CoveringPrimal(vec![0.5, 0.5]));
        assert_eq!(s.enforcements, 0);
        assert_eq!(s.phases, 1);
    }

    #[test]
    fn enforce_single_entry() {
        let c = SparseMatrix::from_dense(&[vec![1.0f64]]);
        let mut st = WhackState::new(&c, 1.0, 0.1, Side::Covering);
        // Start the phase from x_hat = 0.5 by scaling the weight directly.
        st.core.weights.scale(0, 0.5);
        st.core.start_phase();
        st.core.anchor = 1.0;
        st.recompute_dots();
        assert_eq!(st.enforce(0), 8);
        assert!((st.core.weights.values_f64()[0] - 0.5 * 1.1f64.powi(8)).abs() < 1e-12);
        assert_eq!(st.core.t(), 8);
        assert_eq!(st.core.whack_counts(), &[8]);
    }

    #[test]
    fn enforce_updates_other_rows() {
        let c = SparseMatrix::from_dense(&[vec![0.3, 0.2, 0.0], vec![0.5, 0.0, 0.4]]);
        let mut st = WhackState::new(&c, 1.0, 0.1, Side::Covering);
        st.enforce(0);
        let x: Vec<f64> = st.core.weights().mantissas().to_vec();
        let dense = c.mul(&x);
        for (i, d) in dense.iter().enumerate() {
            assert!((st.row_ratio(i) - d / st.core.anchor).abs() < 1e-12);
        }
    }

    #[test]
    fn random_instance_certificate_passes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let d: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..30).map(|_| if rng.gen_bool(0.3) { rng.gen_range(0.5..1.0) } else { 0.0 }).collect())
            .collect();
        let i = inst(&d, 0.1);
        let (o, s) = solve_fast(&i);
        check_certificate(Some(&i.matrix), None, &o, &Slack::covering(0.1)).unwrap();
        assert!(s.phases <= phase_cap(30, 0.1));
    }
}
