//! State shared by every whack-a-mole solver: weights, phase anchor, round
//! counter and per-row whack tallies.

use serde::Serialize;

use crate::scaled::ScaledWeights;
use crate::scalar::{round_budget, Scalar};

use super::step::{step_size_terms, Side, Term};

/// Counters reported by the whack-a-mole solvers.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WhackStats {
    pub phases: u64,
    pub enforcements: u64,
    pub whacks: u64,
    /// Cache entries touched while propagating weight changes.
    pub column_touches: u64,
    /// Largest `ln ||x_hat||_1` seen at any checkpoint.
    pub max_ln_norm: f64,
    /// `(row, delta)` of every enforcement, when recording is enabled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<(usize, u64)>>,
}

#[derive(Debug, Clone)]
pub struct WhackCore<F> {
    pub(crate) side: Side,
    pub(crate) lambda: F,
    pub(crate) eps: F,
    pub(crate) weights: ScaledWeights<F>,
    /// Phase anchor `W` in the mantissa frame of `weights`.
    pub(crate) anchor: F,
    pub(crate) t: u64,
    pub(crate) total: u64,
    pub(crate) counts: Vec<u64>,
    pub(crate) stats: WhackStats,
}

impl<F: Scalar> WhackCore<F> {
    pub fn new(side: Side, n: usize, m: usize, lambda: F, eps: F) -> Self {
        let weights = ScaledWeights::filled(n, F::one());
        let anchor = weights.sum_mantissa();
        let mut core = Self {
            side,
            lambda,
            eps,
            weights,
            anchor,
            t: 0,
            total: round_budget(n, lambda, eps),
            counts: vec![0; m],
            stats: WhackStats::default(),
        };
        core.checkpoint();
        core
    }

    pub fn record_trace(&mut self) {
        self.stats.trace = Some(Vec::new());
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn total_rounds(&self) -> u64 {
        self.total
    }

    pub fn is_exhausted(&self) -> bool {
        self.t >= self.total
    }

    /// Phase-relative value of a mantissa-frame row dot.
    pub fn ratio(&self, dot: F) -> F {
        dot / self.anchor
    }

    pub fn row_dot(&self, row: &[(usize, F)]) -> F {
        row.iter().fold(F::zero(), |a, &(j, v)| a + v * self.weights.mantissa(j))
    }

    /// Runs one enforcement of `row`. Returns `delta` and the mantissa change
    /// of every coordinate in the row.
    pub fn enforce(&mut self, index: usize, row: &[(usize, F)]) -> (u64, Vec<(usize, F)>) {
        let terms: Vec<Term<F>> = row
            .iter()
            .map(|&(j, v)| Term {
                coef: v * self.weights.mantissa(j) / self.anchor,
                log_factor: self.side.log_factor(v, self.lambda, self.eps),
            })
            .collect();
        let delta = step_size_terms(&terms, self.total - self.t, self.side);
        let d = F::from_u64(delta).unwrap();
        let changes = row
            .iter()
            .zip(&terms)
            .map(|(&(j, _), term)| (j, self.weights.scale(j, (d * term.log_factor).exp())))
            .collect();
        if index >= self.counts.len() {
            self.counts.resize(index + 1, 0);
        }
        self.counts[index] += delta;
        self.t += delta;
        self.stats.enforcements += 1;
        self.stats.whacks += delta;
        if let Some(trace) = &mut self.stats.trace {
            trace.push((index, delta));
        }
        self.checkpoint();
        (delta, changes)
    }

    /// Keeps the mantissa sum in range. Returns the power of two applied to
    /// all mantissa-frame quantities.
    pub fn renormalize(&mut self) -> Option<F> {
        let k = self.weights.renormalize()?;
        let f = F::pow2(k);
        self.anchor = self.anchor * f;
        Some(f)
    }

    /// Whether the norm left the band of the current phase.
    pub fn phase_ended(&self) -> bool {
        let sum = self.weights.sum_mantissa();
        let half = self.eps / F::c(2.0);
        match self.side {
            Side::Covering => sum * (F::one() - half) > self.anchor,
            Side::Packing => sum * (F::one() + self.eps) < self.anchor * (F::one() + half),
        }
    }

    pub fn start_phase(&mut self) {
        self.weights.resum();
        self.anchor = self.weights.sum_mantissa();
        self.stats.phases += 1;
        self.checkpoint();
    }

    pub fn checkpoint(&mut self) {
        let ln = self.weights.ln_norm().f64();
        self.stats.max_ln_norm = self.stats.max_ln_norm.max(ln);
    }

    /// `x_hat / ||x_hat||_1`.
    pub fn primal(&self) -> Vec<F> {
        self.weights.normalized()
    }

    /// `x_hat / W`.
    pub fn relative_primal(&self) -> Vec<F> {
        self.weights.relative_to(self.anchor)
    }

    /// Whack counts divided by the round budget.
    pub fn dual(&self) -> Vec<F> {
        let total = F::from_u64(self.total).unwrap();
        self.counts.iter().map(|&c| F::from_u64(c).unwrap() / total).collect()
    }

    pub fn weights(&self) -> &ScaledWeights<F> {
        &self.weights
    }

    pub fn whack_counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn stats(&self) -> &WhackStats {
        &self.stats
    }

    pub fn eps(&self) -> F {
        self.eps
    }

    pub fn lambda(&self) -> F {
        self.lambda
    }
}
