//! One dynamic template solver per guess, fed by restricting updates.

use serde::Serialize;

use crate::certificate::Outcome;
use crate::error::{Error, Result};
use crate::instance::GeneralInstance;
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::update::{apply_update, UpdateEvent};
use crate::whack::DynamicWhackState;

use super::{assemble, check_rows, normalize, GeneralSolution, GuessGrid};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReductionCounters {
    pub updates: u64,
    /// Right-hand-side or objective updates below the `1 + eps` threshold.
    pub filtered: u64,
    /// Matrix entries rescaled by applied translation updates.
    pub expanded_entries: u64,
    /// Entry events delivered to the per-guess solvers.
    pub solver_updates: u64,
}

#[derive(Debug, Clone)]
pub struct GeneralDynamic<F> {
    c: SparseMatrix<F>,
    a: Vec<F>,
    b: Vec<F>,
    /// Values of `a` and `b` currently reflected in the template matrices.
    a_applied: Vec<F>,
    b_applied: Vec<F>,
    lo: F,
    hi: F,
    eps: F,
    grid: GuessGrid<F>,
    solvers: Vec<DynamicWhackState<F>>,
    counters: ReductionCounters,
}

impl<F: Scalar> GeneralDynamic<F> {
    pub fn new(inst: &GeneralInstance<F>, eps: F) -> Result<Self> {
        check_rows(&inst.c)?;
        let view = normalize(inst)?;
        let grid = GuessGrid::padded(inst.c.cols(), inst.lo, inst.hi, eps, GuessGrid::<F>::dual_padding(eps));
        let solvers = grid
            .guesses
            .iter()
            .map(|&mu| DynamicWhackState::preprocess(&view.guess_instance(mu, eps)).0)
            .collect();
        Ok(Self {
            c: inst.c.clone(),
            a: inst.a.clone(),
            b: inst.b.clone(),
            a_applied: inst.a.clone(),
            b_applied: inst.b.clone(),
            lo: inst.lo,
            hi: inst.hi,
            eps,
            grid,
            solvers,
            counters: ReductionCounters::default(),
        })
    }

    pub fn grid(&self) -> &GuessGrid<F> {
        &self.grid
    }

    pub fn counters(&self) -> &ReductionCounters {
        &self.counters
    }

    pub fn solvers(&self) -> &[DynamicWhackState<F>] {
        &self.solvers
    }

    pub fn matrix(&self) -> &SparseMatrix<F> {
        &self.c
    }

    pub fn a(&self) -> &[F] {
        &self.a
    }

    pub fn b(&self) -> &[F] {
        &self.b
    }

    fn check_bounds(&self, what: &'static str, v: F) -> Result<()> {
        if v != F::zero() && (v < self.lo || v > self.hi) {
            return Err(Error::InvalidValue { what, value: v.f64() });
        }
        Ok(())
    }

    /// Pushes the current template value of `C(i, j)` to every guess.
    fn push_entry(&mut self, i: usize, j: usize) -> Result<()> {
        let base = self.c.get(i, j) / (self.a_applied[j] * self.b_applied[i]);
        for (k, s) in self.solvers.iter_mut().enumerate() {
            let v = self.grid.guesses[k] * base;
            if v >= s.matrix().get(i, j) {
                continue;
            }
            self.counters.solver_updates += 1;
            match s.handle_update(&UpdateEvent::RestrictCoveringEntry { row: i, col: j, value: v }) {
                Ok(_) | Err(Error::UpdateAfterTerminal) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    /// Applies a restricting update: a decrease of `C`, or an increase of
    /// `b` (`TranslateCovering`) or `a` (`TranslateObjective`).
    pub fn update(&mut self, event: &UpdateEvent<F>) -> Result<()> {
        match *event {
            UpdateEvent::RestrictCoveringEntry { row, col, value } => {
                self.check_bounds("C entry", value)?;
                apply_update(&mut self.c, event)?;
                self.counters.updates += 1;
                self.push_entry(row, col)
            }
            UpdateEvent::TranslateCovering { row, value } => {
                let old = *self.b.get(row).ok_or(Error::IndexOutOfRange { row, col: 0, m: self.b.len(), n: 0 })?;
                if !(value > old) {
                    return Err(Error::NonMonotoneUpdate { row, col: usize::MAX, old: old.f64(), new: value.f64() });
                }
                self.check_bounds("b", value)?;
                self.b[row] = value;
                self.counters.updates += 1;
                if value < self.b_applied[row] * (F::one() + self.eps) {
                    self.counters.filtered += 1;
                    return Ok(());
                }
                self.b_applied[row] = value;
                let cols: Vec<usize> = self.c.row(row).iter().map(|e| e.0).collect();
                self.counters.expanded_entries += cols.len() as u64;
                cols.into_iter().try_for_each(|j| self.push_entry(row, j))
            }
            UpdateEvent::TranslateObjective { col, value } => {
                let old = *self.a.get(col).ok_or(Error::IndexOutOfRange { row: 0, col, m: 0, n: self.a.len() })?;
                if !(value > old) {
                    return Err(Error::NonMonotoneUpdate { row: usize::MAX, col, old: old.f64(), new: value.f64() });
                }
                self.check_bounds("a", value)?;
                self.a[col] = value;
                self.counters.updates += 1;
                if value < self.a_applied[col] * (F::one() + self.eps) {
                    self.counters.filtered += 1;
                    return Ok(());
                }
                self.a_applied[col] = value;
                let rows: Vec<usize> = self.c.col(col).iter().map(|e| e.0).collect();
                self.counters.expanded_entries += rows.len() as u64;
                rows.into_iter().try_for_each(|i| self.push_entry(i, col))
            }
            _ => Err(Error::InvalidValue { what: "restricting general update", value: f64::NAN }),
        }
    }

    /// Pair read off the smallest guess still holding a primal.
    pub fn solution(&self) -> Result<GeneralSolution<F>> {
        let k = self
            .solvers
            .iter()
            .position(|s| !s.is_terminal())
            .ok_or(Error::InvalidValue { what: "every guess returned a dual", value: f64::NAN })?;
        let Outcome::CoveringPrimal(x) = self.solvers[k].outcome() else { unreachable!() };
        let y = (k > 0).then(|| match self.solvers[k - 1].outcome() {
            Outcome::PackingDual(y) => y,
            _ => unreachable!(),
        });
        Ok(assemble(&self.a_applied, &self.b_applied, &self.grid, k, &x, y.as_deref(), self.solvers.len()))
            .map(|mut s| {
                s.objective = s.x.iter().zip(&self.a).fold(F::zero(), |acc, (&x, &a)| acc + x * a);
                s.dual_objective = s.y.as_ref().map(|y| y.iter().zip(&self.b).fold(F::zero(), |acc, (&y, &b)| acc + y * b));
                s
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> GeneralDynamic<f64> {
        let g = GeneralInstance {
            c: SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0]]),
            a: vec![1.0, 1.0],
            b: vec![1.0, 1.0],
            lo: 0.5,
            hi: 2.0,
        };
        GeneralDynamic::new(&g, 0.1).unwrap()
    }

    #[test]
    fn small_rhs_change_is_filtered() {
        let mut d = two_by_two();
        d.update(&UpdateEvent::TranslateCovering { row: 1, value: 1.05 }).unwrap();
        assert_eq!(d.counters().filtered, 1);
        assert_eq!(d.counters().solver_updates, 0);
    }

    #[test]
    fn large_rhs_change_rescales_row() {
        let mut d = two_by_two();
        d.update(&UpdateEvent::TranslateCovering { row: 1, value: 1.2 }).unwrap();
        assert_eq!(d.counters().expanded_entries, 2);
        let mu = d.grid().get(0);
        let c2 = d.solvers()[0].matrix();
        assert!((c2.get(1, 0) - mu * 2.0 / 1.2).abs() < 1e-12);
    }

    #[test]
    fn decreasing_rhs_is_rejected() {
        let mut d = two_by_two();
        assert!(matches!(
            d.update(&UpdateEvent::TranslateCovering { row: 0, value: 0.9 }),
            Err(Error::NonMonotoneUpdate { .. })
        ));
    }

    #[test]
    fn maintained_objective_tracks_optimum() {
        let mut d = two_by_two();
        let s = d.solution().unwrap();
        assert!(s.objective >= 2.0 / 3.0 * 0.6 && s.objective <= 2.0 / 3.0 * 1.4 / 0.6, "{s:?}");
        d.update(&UpdateEvent::RestrictCoveringEntry { row: 0, col: 1, value: 1.0 }).unwrap();
        let s = d.solution().unwrap();
        let cx = d.matrix().mul(&s.x);
        assert!(cx.iter().zip(d.b()).all(|(&v, &b)| v >= (1.0 - 0.1) * b / 1.1 - 1e-9), "{cx:?}");
    }
}
