//! Reference round-by-round templates: one whack per round.

use crate::certificate::Outcome;
use crate::instance::NormalizedInstance;
use crate::scalar::{round_budget, Scalar};

use super::step::{whack, whack_packing};

/// Decision taken in one round of the template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    /// Return the current primal vector.
    Primal,
    /// Whack the given row.
    Whack(usize),
}

/// Picks the action of each round from the current `C x^t`.
pub trait Selector<F> {
    fn pick(&mut self, round: u64, cx: &[F], eps: F) -> Choice;
}

/// Returns the primal as soon as every row is `(1 - eps)`-covered, else
/// whacks the lowest-index row with `(C x)_i < 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LowestIndex;

impl<F: Scalar> Selector<F> for LowestIndex {
    fn pick(&mut self, _round: u64, cx: &[F], eps: F) -> Choice {
        if cx.iter().all(|&v| v >= F::one() - eps) {
            return Choice::Primal;
        }
        let i = cx.iter().position(|&v| v < F::one()).expect("some row is below 1 - eps");
        Choice::Whack(i)
    }
}

/// Covering template with the default selector.
pub fn solve_basic<F: Scalar>(inst: &NormalizedInstance<F>) -> Outcome<F> {
    solve_basic_with(inst, &mut LowestIndex)
}

/// Covering template with a caller-supplied selector.
pub fn solve_basic_with<F: Scalar, S: Selector<F>>(inst: &NormalizedInstance<F>, sel: &mut S) -> Outcome<F> {
    let c = &inst.matrix;
    let total = round_budget(c.cols(), inst.lambda, inst.eps);
    let mut x_hat = vec![F::one(); c.cols()];
    let mut counts = vec![0u64; c.rows()];
    for round in 0..total {
        let norm = x_hat.iter().fold(F::zero(), |a, &b| a + b);
        let x: Vec<F> = x_hat.iter().map(|&v| v / norm).collect();
        match sel.pick(round, &c.mul(&x), inst.eps) {
            Choice::Primal => return Outcome::CoveringPrimal(x),
            Choice::Whack(i) => {
                whack(c.row(i), &mut x_hat, inst.lambda, inst.eps);
                counts[i] += 1;
            }
        }
    }
    let t = F::from_u64(total).unwrap();
    Outcome::PackingDual(counts.iter().map(|&k| F::from_u64(k).unwrap() / t).collect())
}

/// Packing template: returns the primal once every `(P x)_i <= 1 + eps`,
/// otherwise whacks the lowest-index row with `(P x)_i > 1`.
pub fn solve_packing_basic<F: Scalar>(inst: &NormalizedInstance<F>) -> Outcome<F> {
    let p = &inst.matrix;
    let total = round_budget(p.cols(), inst.lambda, inst.eps);
    let mut x_hat = vec![F::one(); p.cols()];
    let mut counts = vec![0u64; p.rows()];
    for _ in 0..total {
        let norm = x_hat.iter().fold(F::zero(), |a, &b| a + b);
        let x: Vec<F> = x_hat.iter().map(|&v| v / norm).collect();
        let px = p.mul(&x);
        if px.iter().all(|&v| v <= F::one() + inst.eps) {
            return Outcome::PackingPrimal(x);
        }
        let i = px.iter().position(|&v| v > F::one()).expect("some row above 1 + eps");
        whack_packing(p.row(i), &mut x_hat, inst.lambda, inst.eps);
        counts[i] += 1;
    }
    let t = F::from_u64(total).unwrap();
    Outcome::CoveringDual(counts.iter().map(|&k| F::from_u64(k).unwrap() / t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{check_certificate, Slack};
    use crate::matrix::SparseMatrix;

    fn inst(d: &[Vec<f64>], eps: f64) -> NormalizedInstance<f64> {
        NormalizedInstance::new(SparseMatrix::from_dense(d), 1.0, eps)
    }

    #[test]
    fn unit_is_primal_immediately() {
        assert_eq!(solve_basic(&inst(&[vec![1.0]], 0.1)), Outcome::CoveringPrimal(vec![1.0]));
    }

    #[test]
    fn small_entry_whacks_every_round() {
        assert_eq!(solve_basic(&inst(&[vec![0.4]], 0.1)), Outcome::PackingDual(vec![1.0]));
    }

    #[test]
    fn identity_gives_valid_dual() {
        let i = inst(&[vec![1.0, 0.0], vec![0.0, 1.0]], 0.1);
        let o = solve_basic(&i);
        assert!(matches!(o, Outcome::PackingDual(_)), "{o:?}");
        check_certificate(Some(&i.matrix), None, &o, &Slack::covering(0.1)).unwrap();
    }

    #[test]
    fn packing_examples() {
        assert_eq!(solve_packing_basic(&inst(&[vec![1.0]], 0.1)), Outcome::PackingPrimal(vec![1.0]));
        assert_eq!(solve_packing_basic(&inst(&[vec![1.0, 1.0]], 0.1)), Outcome::PackingPrimal(vec![0.5, 0.5]));
        assert_eq!(solve_packing_basic(&inst(&[vec![1.0], vec![1.0]], 0.1)), Outcome::PackingPrimal(vec![1.0]));
    }
}
