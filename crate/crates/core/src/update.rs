//! Monotone update events.

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateEvent<F> {
    /// Decrease a covering entry.
    RestrictCoveringEntry { row: usize, col: usize, value: F },
    /// Increase a covering entry.
    RelaxCoveringEntry { row: usize, col: usize, value: F },
    /// Decrease a packing entry.
    RelaxPackingEntry { row: usize, col: usize, value: F },
    /// New right-hand side of a packing row.
    TranslatePacking { row: usize, value: F },
    /// New right-hand side of a covering row.
    TranslateCovering { row: usize, value: F },
    /// New objective coefficient.
    TranslateObjective { col: usize, value: F },
}

impl<F: Scalar> UpdateEvent<F> {
    pub fn is_entry(&self) -> bool {
        matches!(
            self,
            Self::RestrictCoveringEntry { .. } | Self::RelaxCoveringEntry { .. } | Self::RelaxPackingEntry { .. }
        )
    }
}

/// Applies an entry event to `matrix`, returning the previous value.
pub fn apply_update<F: Scalar>(matrix: &mut SparseMatrix<F>, event: &UpdateEvent<F>) -> Result<F> {
    let (row, col, value, decreasing) = match *event {
        UpdateEvent::RestrictCoveringEntry { row, col, value } => (row, col, value, true),
        UpdateEvent::RelaxCoveringEntry { row, col, value } => (row, col, value, false),
        UpdateEvent::RelaxPackingEntry { row, col, value } => (row, col, value, true),
        _ => return Err(Error::InvalidValue { what: "entry event", value: f64::NAN }),
    };
    matrix.check_index(row, col)?;
    if value < F::zero() || !value.is_finite() {
        return Err(Error::NegativeEntry { row, col, value: value.f64() });
    }
    let old = matrix.get(row, col);
    let monotone = if decreasing { value < old } else { value > old };
    if !monotone {
        return Err(Error::NonMonotoneUpdate { row, col, old: old.f64(), new: value.f64() });
    }
    matrix.set(row, col, value);
    Ok(old)
}
