//! Online general LPs: each arriving row is normalized and sent to every live guess.

use serde::Serialize;

use crate::certificate::Outcome;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::whack::OnlineState;

use super::{assemble, check_scales, GeneralSolution, GuessGrid};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OnlineReport {
    pub rows: usize,
    pub guesses: usize,
    pub recourse: u64,
    pub phase_transitions: u64,
}

#[derive(Debug, Clone)]
pub struct GeneralOnline<F> {
    a: Vec<F>,
    b: Vec<F>,
    lo: F,
    hi: F,
    grid: GuessGrid<F>,
    solvers: Vec<OnlineState<F>>,
}

impl<F: Scalar> GeneralOnline<F> {
    /// Fresh solver for objective `a` with entries of `C`, `a`, `b` in `[lo, hi]`.
    pub fn new(a: Vec<F>, lo: F, hi: F, eps: F) -> Result<Self> {
        check_scales("a", &a)?;
        let grid = GuessGrid::new(a.len(), lo, hi, eps);
        let lambda_prime = hi / (lo * lo);
        let solvers = grid.guesses.iter().map(|&mu| OnlineState::new(a.len(), mu * lambda_prime, eps)).collect();
        Ok(Self { a, b: Vec::new(), lo, hi, grid, solvers })
    }

    pub fn grid(&self) -> &GuessGrid<F> {
        &self.grid
    }

    pub fn solvers(&self) -> &[OnlineState<F>] {
        &self.solvers
    }

    /// Adds the constraint `row . x >= b_i`. Guesses that already hold a dual are skipped.
    pub fn insert_row(&mut self, row: &[(usize, F)], b_i: F) -> Result<()> {
        check_scales("b", &[b_i]).map_err(|_| Error::ZeroScaleFactor { which: "b", index: self.b.len() })?;
        for &(_, v) in row {
            if v != F::zero() && (v < self.lo || v > self.hi) {
                return Err(Error::InvalidValue { what: "C entry", value: v.f64() });
            }
        }
        if row.iter().all(|&(_, v)| v == F::zero()) {
            return Err(Error::InvalidValue { what: "empty covering row", value: self.b.len() as f64 });
        }
        self.b.push(b_i);
        let base: Vec<(usize, F)> = row.iter().map(|&(j, v)| (j, v / (self.a[j] * b_i))).collect();
        for (k, s) in self.solvers.iter_mut().enumerate() {
            if s.inner().is_terminal() {
                continue;
            }
            let mu = self.grid.get(k);
            let scaled: Vec<(usize, F)> = base.iter().map(|&(j, v)| (j, mu * v)).collect();
            s.insert_row(&scaled)?;
        }
        Ok(())
    }

    pub fn report(&self) -> OnlineReport {
        OnlineReport {
            rows: self.b.len(),
            guesses: self.grid.len(),
            recourse: self.solvers.iter().map(OnlineState::recourse_total).sum(),
            phase_transitions: self.solvers.iter().map(OnlineState::phase_transitions).sum(),
        }
    }

    /// Pair read off the smallest guess still holding a primal.
    pub fn solution(&self) -> Result<GeneralSolution<F>> {
        let k = self
            .solvers
            .iter()
            .position(|s| !s.inner().is_terminal())
            .ok_or(Error::InvalidValue { what: "every guess returned a dual", value: f64::NAN })?;
        let Outcome::CoveringPrimal(x) = self.solvers[k].outcome() else { unreachable!() };
        // Rows that arrived after guess k-1 terminated get a zero dual.
        let y = (k > 0).then(|| match self.solvers[k - 1].outcome() {
            Outcome::PackingDual(mut y) => {
                y.resize(self.b.len(), F::zero());
                y
            }
            _ => unreachable!(),
        });
        Ok(assemble(&self.a, &self.b, &self.grid, k, &x, y.as_deref(), self.solvers.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SparseMatrix;

    #[test]
    fn recourse_sums_over_guesses() {
        let mut o = GeneralOnline::new(vec![1.0, 1.0], 0.5, 2.0, 0.1).unwrap();
        for row in [vec![(0, 1.0), (1, 2.0)], vec![(0, 2.0), (1, 1.0)], vec![(0, 0.5)]] {
            o.insert_row(&row, 1.0).unwrap();
        }
        let r = o.report();
        assert_eq!(r.recourse, 2 * r.phase_transitions);
        let per: u64 = o.solvers().iter().map(OnlineState::recourse_total).sum();
        assert_eq!(r.recourse, per);
        let s = o.solution().unwrap();
        let c = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0], vec![0.5, 0.0]]);
        assert!(c.mul(&s.x).iter().all(|&v| v >= 1.0 - 0.1 - 1e-9), "{s:?}");
    }

    #[test]
    fn out_of_range_entry_is_rejected() {
        let mut o = GeneralOnline::new(vec![1.0], 0.5, 2.0, 0.1).unwrap();
        assert!(o.insert_row(&[(0, 3.0)], 1.0).is_err());
    }
}
