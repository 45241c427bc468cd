//! Packing duals read off the greedy solver run on `1^T x <= 1, C x >= 1`.

use crate::certificate::{Outcome, Slack};
use crate::error::{Error, Result};
use crate::instance::PositiveInstance;
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::update::UpdateEvent;

use super::dynamic::{GreedyOptions, GreedyState, Status};

/// `y_j = w_c(x, j) / w*_c` where `w*_c = (1 - eps) w_c` at the start of the
/// current phase, so that `1^T y >= 1` and `C^T y <= (1 + 5 eps) 1`.
pub fn extract_packing_dual<F: Scalar>(state: &GreedyState<F>) -> Result<Vec<F>> {
    if state.status() != Status::Infeasible {
        return Err(Error::NotInfeasibleYet);
    }
    Ok(state.phase_scaled_covering_weights())
}

/// Slack for primal answers of the encoding: `1^T x <= 1 + 200 eps`, `C x >= 1`.
pub fn encoded_primal_slack(eps: f64) -> Slack {
    Slack { primal_mass: (0.0, 1.0 + 200.0 * eps), cover_floor: 1.0, ..Slack::covering(eps) }
}

/// The covering template under relaxing updates to `C`, through its positive encoding.
#[derive(Debug, Clone)]
pub struct RelaxingCovering<F> {
    state: GreedyState<F>,
}

impl<F: Scalar> RelaxingCovering<F> {
    pub fn new(c: SparseMatrix<F>, eps: F) -> Self {
        Self::with_options(c, eps, GreedyOptions::default())
    }

    pub fn with_options(c: SparseMatrix<F>, eps: F, options: GreedyOptions) -> Self {
        let inst = PositiveInstance::covering_encoding(c, eps);
        Self { state: GreedyState::with_options(&inst, options) }
    }

    pub fn state(&self) -> &GreedyState<F> {
        &self.state
    }

    /// Raises `C(row, col)` to `value`.
    pub fn relax(&mut self, row: usize, col: usize, value: F) -> Result<Outcome<F>> {
        self.state.handle_relaxing(&UpdateEvent::RelaxCoveringEntry { row, col, value })?;
        Ok(self.outcome())
    }

    /// `CoveringPrimal(x)` once `C x >= 1`, otherwise the extracted `PackingDual(y)`.
    pub fn outcome(&self) -> Outcome<F> {
        match self.state.status() {
            Status::Solved => Outcome::CoveringPrimal(self.state.x().to_vec()),
            _ => Outcome::PackingDual(extract_packing_dual(&self.state).expect("infeasible state")),
        }
    }
}
