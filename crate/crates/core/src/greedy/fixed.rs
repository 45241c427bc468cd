//! Static greedy solver for `P x <= 1, C x >= 1` with exact costs and
//! exact boost lengths.

use serde::Serialize;

use crate::certificate::Outcome;
use crate::instance::PositiveInstance;
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

use super::potentials::eta;
use super::weights::SideWeights;
use super::CHEAP_SLACK;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StaticStats {
    pub boosts: Vec<u64>,
    /// Full passes over the coordinates.
    pub sweeps: u64,
}

struct Run<'a, F> {
    p: &'a SparseMatrix<F>,
    c: &'a SparseMatrix<F>,
    x: Vec<F>,
    pw: SideWeights<F>,
    cw: SideWeights<F>,
    eps: F,
    eta: F,
    unsatisfied: usize,
}

impl<F: Scalar> Run<'_, F> {
    fn column_sum(w: &SideWeights<F>, col: &[(usize, F)]) -> F {
        col.iter().fold(F::zero(), |s, &(i, v)| s + w.weight(i) * v)
    }

    /// `lambda(x,k) <= (1 + 5 eps) w_p / w_c`, compared in logs.
    fn cheap(&self, k: usize) -> bool {
        let den = Self::column_sum(&self.cw, self.c.col(k));
        if !(den > F::zero()) {
            return false;
        }
        let num = Self::column_sum(&self.pw, self.p.col(k));
        if num == F::zero() {
            return true;
        }
        let lhs = num.ln() + self.pw.shift() - den.ln() - self.cw.shift();
        lhs <= self.pw.ln_total() - self.cw.ln_total() + (F::one() + F::c(CHEAP_SLACK) * self.eps).ln()
    }

    /// `eps / (eta * max entry)` over packing rows and covering rows with `C_j x < 2`.
    fn delta(&self, k: usize) -> Option<F> {
        let two = F::c(2.0);
        let top = self.p.col(k).iter().map(|e| e.1).fold(F::zero(), F::max);
        let top = self.c.col(k).iter().filter(|&&(j, _)| self.cw.dot(j) < two).map(|e| e.1).fold(top, F::max);
        (top > F::zero()).then(|| self.eps / (self.eta * top))
    }

    fn boost(&mut self, k: usize, delta: F) {
        self.x[k] = self.x[k] + delta;
        for &(j, v) in self.c.col(k) {
            let old = self.cw.dot(j);
            let new = old + v * delta;
            if old < F::one() && new >= F::one() {
                self.unsatisfied -= 1;
            }
            self.cw.set_dot(j, new);
        }
        for &(i, v) in self.p.col(k) {
            let d = self.pw.dot(i) + v * delta;
            self.pw.set_dot(i, d);
        }
    }

    fn resync(&mut self) {
        self.pw = SideWeights::new(self.p.mul(&self.x), self.eta);
        self.cw = SideWeights::new(self.c.mul(&self.x), -self.eta);
        self.unsatisfied = self.cw.dots().iter().filter(|&&d| d < F::one()).count();
    }
}

/// Boosts cheap coordinates until `C x >= 1`, or reports infeasibility
/// once a full sweep finds no cheap coordinate.
pub fn solve_static_positive<F: Scalar>(inst: &PositiveInstance<F>) -> (Outcome<F>, StaticStats) {
    let n = inst.n();
    let eta = eta(inst.p.rows(), inst.c.rows(), inst.lo, inst.hi, inst.eps);
    let mut run = Run {
        p: &inst.p,
        c: &inst.c,
        x: vec![F::zero(); n],
        pw: SideWeights::new(vec![F::zero(); inst.p.rows()], eta),
        cw: SideWeights::new(vec![F::zero(); inst.c.rows()], -eta),
        eps: inst.eps,
        eta,
        unsatisfied: inst.c.rows(),
    };
    let mut stats = StaticStats { boosts: vec![0; n], sweeps: 0 };
    let mut idle = 0;
    let mut k = 0;
    while run.unsatisfied > 0 {
        if k == 0 {
            stats.sweeps += 1;
        }
        let mut boosted = false;
        while run.unsatisfied > 0 && run.cheap(k) {
            let Some(delta) = run.delta(k) else { break };
            run.boost(k, delta);
            stats.boosts[k] += 1;
            boosted = true;
        }
        idle = if boosted { 0 } else { idle + 1 };
        if idle >= n {
            // Confirm on freshly summed weights before giving up.
            run.resync();
            if run.unsatisfied == 0 {
                break;
            }
            if !(0..n).any(|k| run.cheap(k) && run.delta(k).is_some()) {
                return (Outcome::Infeasible(None), stats);
            }
            idle = 0;
        }
        k = (k + 1) % n;
    }
    (Outcome::PositiveSolution(run.x), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{check_certificate, Slack};

    fn inst(p: &[Vec<f64>], c: &[Vec<f64>]) -> PositiveInstance<f64> {
        PositiveInstance::with_data_bounds(SparseMatrix::from_dense(p), SparseMatrix::from_dense(c), 1.0 / 200.0)
    }

    #[test]
    fn unit_instance_is_feasible() {
        let i = inst(&[vec![1.0]], &[vec![1.0]]);
        let (o, _) = solve_static_positive(&i);
        let Outcome::PositiveSolution(x) = &o else { panic!("{o:?}") };
        assert!(x[0] >= 1.0 && x[0] <= 1.0 + 200.0 / 200.0);
        check_certificate(Some(&i.c), Some(&i.p), &o, &Slack::positive(i.eps)).unwrap();
    }

    #[test]
    fn double_cover_needs_half() {
        let i = inst(&[vec![1.0]], &[vec![2.0]]);
        let (o, _) = solve_static_positive(&i);
        let Outcome::PositiveSolution(x) = o else { panic!() };
        assert!(x[0] >= 0.5 && x[0] < 0.52, "{x:?}");
    }

    #[test]
    fn weak_cover_is_infeasible() {
        let (o, _) = solve_static_positive(&inst(&[vec![1.0]], &[vec![0.4]]));
        assert_eq!(o, Outcome::Infeasible(None));
    }

    #[test]
    fn no_covering_rows_is_trivially_feasible() {
        let i = PositiveInstance::with_data_bounds(SparseMatrix::from_dense(&[vec![1.0]]), SparseMatrix::new(0, 1), 0.005);
        assert_eq!(solve_static_positive(&i).0, Outcome::PositiveSolution(vec![0.0]));
    }
}
