//! Online covering: rows arrive one at a time, `m` is never known.

use crate::certificate::Outcome;
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

use super::dynamic::DynamicWhackState;

#[derive(Debug, Clone, PartialEq)]
pub enum InsertResult<F> {
    /// Current `x_hat / W` over all rows seen so far.
    Maintained(Vec<F>),
    /// Dual over the rows seen so far; no further rows are accepted.
    Terminated(Vec<F>),
}

#[derive(Debug, Clone)]
pub struct OnlineState<F> {
    inner: DynamicWhackState<F>,
}

impl<F: Scalar> OnlineState<F> {
    /// Fresh state over `n` variables with entries bounded by `lambda`.
    pub fn new(n: usize, lambda: F, eps: F) -> Self {
        let mut inner = DynamicWhackState::empty(SparseMatrix::new(0, n), lambda, eps);
        inner.start();
        Self { inner }
    }

    pub fn insert_row(&mut self, entries: &[(usize, F)]) -> Result<InsertResult<F>> {
        if self.inner.is_terminal() {
            return Err(Error::RowAfterTermination);
        }
        let lambda = self.inner.core().lambda();
        let row = self.inner.matrix().rows();
        for &(col, v) in entries {
            if v < F::zero() || !v.is_finite() {
                return Err(Error::NegativeEntry { row, col, value: v.f64() });
            }
            if v > lambda {
                return Err(Error::EntryAboveLambda { row, col, value: v.f64(), lambda: lambda.f64() });
            }
        }
        Ok(match self.inner.insert_row(entries)? {
            Outcome::PackingDual(y) => InsertResult::Terminated(y),
            Outcome::CoveringPrimal(x) => InsertResult::Maintained(x),
            other => unreachable!("unexpected outcome {other:?}"),
        })
    }

    /// `n` for every phase transition so far.
    pub fn recourse_total(&self) -> u64 {
        self.inner.phases().saturating_sub(1) * self.inner.matrix().cols() as u64
    }

    pub fn phase_transitions(&self) -> u64 {
        self.inner.phases().saturating_sub(1)
    }

    pub fn inner(&self) -> &DynamicWhackState<F> {
        &self.inner
    }

    pub fn outcome(&self) -> Outcome<F> {
        self.inner.outcome()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{check_certificate, Slack};

    #[test]
    fn first_row_enforces_eight_whacks() {
        let mut s = OnlineState::new(2, 1.0, 0.1);
        s.inner.core_mut().record_trace();
        let r = s.insert_row(&[(0, 1.0)]).unwrap();
        assert_eq!(s.inner().core().stats().trace.as_ref().unwrap()[0], (0, 8));
        let InsertResult::Maintained(x) = r else { panic!() };
        assert!(x[0] >= 0.9);
    }

    #[test]
    fn covered_row_costs_nothing() {
        let mut s = OnlineState::new(2, 1.0, 0.1);
        s.insert_row(&[(0, 1.0), (1, 1.0)]).unwrap();
        assert_eq!(s.recourse_total(), 0);
        assert_eq!(s.inner().core().t(), 0);
    }

    #[test]
    fn fresh_state_has_no_recourse() {
        assert_eq!(OnlineState::new(3, 1.0, 0.1f64).recourse_total(), 0);
    }

    #[test]
    fn recourse_is_n_per_phase() {
        let mut s = OnlineState::new(3, 1.0, 0.1);
        s.insert_row(&[(0, 1.0), (1, 1.0), (2, 0.8)]).unwrap();
        assert!(s.phase_transitions() >= 1);
        assert_eq!(s.recourse_total(), 3 * s.phase_transitions());
    }

    #[test]
    fn shrinking_support_terminates_with_valid_dual() {
        let mut s = OnlineState::new(4, 1.0, 0.1);
        let rows: Vec<Vec<(usize, f64)>> = vec![
            vec![(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)],
            vec![(0, 1.0), (1, 1.0), (2, 1.0)],
            vec![(0, 1.0), (1, 1.0)],
            vec![(0, 1.0)],
            vec![(1, 1.0)],
        ];
        let mut all = SparseMatrix::new(0, 4);
        let mut dual = None;
        'outer: for _ in 0..50 {
            for r in &rows {
                all.push_row(r).unwrap();
                if let InsertResult::Terminated(y) = s.insert_row(r).unwrap() {
                    dual = Some(y);
                    break 'outer;
                }
                check_certificate(Some(&all), None, &s.outcome(), &Slack::online_covering(0.1)).unwrap();
            }
        }
        let y = dual.expect("terminated");
        check_certificate(Some(&all), None, &Outcome::PackingDual(y), &Slack::covering(0.1)).unwrap();
        assert!(matches!(s.insert_row(&[(0, 1.0)]), Err(Error::RowAfterTermination)));
    }
}
