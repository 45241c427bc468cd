//! Phase-based packing template with decreasing weights.

use crate::certificate::Outcome;
use crate::instance::NormalizedInstance;
use crate::scalar::Scalar;

use super::engine::WhackStats;
use super::fast::{Finish, WhackState};
use super::step::Side;

/// Returns `PackingPrimal(x)` with `P x <= (1 + eps) 1` or
/// `CoveringDual(y)` with `P^T y >= (1 - 4 eps) 1`.
///
/// Rows are enforced when `(P x_hat / W)_i > 1 + eps/2`, and a new phase
/// starts once `||x_hat||_1 < W (1 + eps/2) / (1 + eps)`.
pub fn solve_packing_fast<F: Scalar>(inst: &NormalizedInstance<F>) -> (Outcome<F>, WhackStats) {
    let mut state = WhackState::new(&inst.matrix, inst.lambda, inst.eps, Side::Packing);
    let outcome = match state.run() {
        Finish::Primal(x) => Outcome::PackingPrimal(x),
        Finish::Dual(y) => Outcome::CoveringDual(y),
    };
    (outcome, state.into_stats())
}
