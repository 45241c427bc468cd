//! Multi-pass streaming covering solver over row-arrival streams.
//!
//! Between rows the solver keeps only `x_hat`, `W`, `t`, `T` and, in
//! [`StreamMode::FullDual`], the per-row whack counts.

use serde::Serialize;

use crate::certificate::Outcome;
use crate::error::Result;
use crate::matrix::SparseMatrix;
use crate::scaled::ScaledWeights;
use crate::scalar::{round_budget, Scalar};

use super::step::{step_size_terms, Side, Term};

/// One streamed row: its index and entries.
pub type StreamedRow<F> = Result<(usize, Vec<(usize, F)>)>;

/// A re-iterable stream of `(row index, row entries)`.
pub trait RowSource<F> {
    fn cols(&self) -> usize;
    /// Starts a fresh pass over the rows.
    fn pass(&mut self) -> Box<dyn Iterator<Item = StreamedRow<F>> + '_>;
}

/// Streams the rows of an in-memory matrix.
#[derive(Debug, Clone, Copy)]
pub struct MatrixRows<'a, F>(pub &'a SparseMatrix<F>);

impl<F: Scalar> RowSource<F> for MatrixRows<'_, F> {
    fn cols(&self) -> usize {
        self.0.cols()
    }

    fn pass(&mut self) -> Box<dyn Iterator<Item = StreamedRow<F>> + '_> {
        let m = self.0;
        Box::new((0..m.rows()).map(move |i| Ok((i, m.row(i).to_vec()))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StreamMode {
    /// Keeps whack counts so the dual can be returned: O(m + n) words.
    FullDual,
    /// Keeps only the primal weights: O(n) words; returns `Null` instead of a dual.
    PrimalOnly,
}

#[derive(Debug, Clone)]
pub enum PassResult<F> {
    Finished(Outcome<F>),
    /// The norm left the phase band; the pass was abandoned.
    PhaseEnded,
    /// Every row was covered during the pass; the primal is ready.
    PassComplete,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StreamStats {
    pub passes: u64,
    pub phases: u64,
    pub enforcements: u64,
    pub whacks: u64,
    /// Largest number of solver words held between two rows.
    pub max_live_words: usize,
}

/// Solver state carried between rows and passes.
#[derive(Debug, Clone)]
pub struct StreamState<F> {
    weights: ScaledWeights<F>,
    anchor: F,
    t: u64,
    total: u64,
    lambda: F,
    eps: F,
    counts: Option<Vec<u64>>,
    stats: StreamStats,
}

impl<F: Scalar> StreamState<F> {
    pub fn new(n: usize, lambda: F, eps: F, mode: StreamMode) -> Self {
        let weights = ScaledWeights::filled(n, F::one());
        let anchor = weights.sum_mantissa();
        Self {
            weights,
            anchor,
            t: 0,
            total: round_budget(n, lambda, eps),
            lambda,
            eps,
            counts: (mode == StreamMode::FullDual).then(Vec::new),
            stats: StreamStats::default(),
        }
    }

    /// Words of solver state: weights, counts and six scalars.
    pub fn live_words(&self) -> usize {
        self.weights.len() + self.counts.as_ref().map_or(0, Vec::len) + 6
    }

    pub fn stats(&self) -> &StreamStats {
        &self.stats
    }

    pub fn primal(&self) -> Vec<F> {
        self.weights.normalized()
    }

    fn terminal(&self) -> Outcome<F> {
        match &self.counts {
            Some(c) => {
                let t = F::from_u64(self.total).unwrap();
                Outcome::PackingDual(c.iter().map(|&k| F::from_u64(k).unwrap() / t).collect())
            }
            None => Outcome::Null,
        }
    }

    /// Opens the next pass, which is also the next phase.
    pub(crate) fn begin_pass(&mut self) {
        self.stats.passes += 1;
        self.stats.phases += 1;
        self.weights.resum();
        self.anchor = self.weights.sum_mantissa();
        self.observe();
    }

    /// Processes one streamed row; `Some` ends the current pass.
    pub(crate) fn feed(&mut self, i: usize, row: &[(usize, F)]) -> Option<PassResult<F>> {
        let r = self.process_row(i, row);
        self.observe();
        r
    }

    fn observe(&mut self) {
        self.stats.max_live_words = self.stats.max_live_words.max(self.live_words());
    }

    fn process_row(&mut self, i: usize, row: &[(usize, F)]) -> Option<PassResult<F>> {
        if let Some(c) = &mut self.counts {
            if c.len() <= i {
                c.resize(i + 1, 0);
            }
        }
        let terms: Vec<Term<F>> = row
            .iter()
            .map(|&(j, v)| Term {
                coef: v * self.weights.mantissa(j) / self.anchor,
                log_factor: Side::Covering.log_factor(v, self.lambda, self.eps),
            })
            .collect();
        let value = terms.iter().fold(F::zero(), |a, t| a + t.coef);
        if !Side::Covering.violated(value, self.eps) {
            return None;
        }
        let delta = step_size_terms(&terms, self.total - self.t, Side::Covering);
        let d = F::from_u64(delta).unwrap();
        for (&(j, _), term) in row.iter().zip(&terms) {
            self.weights.scale(j, (d * term.log_factor).exp());
        }
        if let Some(k) = self.weights.renormalize() {
            self.anchor = self.anchor * F::pow2(k);
        }
        if let Some(c) = &mut self.counts {
            c[i] += delta;
        }
        self.t += delta;
        self.stats.enforcements += 1;
        self.stats.whacks += delta;
        if self.t >= self.total {
            return Some(PassResult::Finished(self.terminal()));
        }
        let sum = self.weights.sum_mantissa();
        (sum * (F::one() - self.eps / F::c(2.0)) > self.anchor).then_some(PassResult::PhaseEnded)
    }
}

/// A row source together with its pass counter.
pub struct StreamCursor<S> {
    pub source: S,
    pub pass_count: u64,
    pub mode: StreamMode,
}

impl<S> StreamCursor<S> {
    pub fn new(source: S, mode: StreamMode) -> Self {
        Self { source, pass_count: 0, mode }
    }

    /// Makes one pass over the stream; every pass opens a new phase.
    pub fn run_pass<F: Scalar>(&mut self, state: &mut StreamState<F>) -> Result<PassResult<F>>
    where
        S: RowSource<F>,
    {
        self.pass_count += 1;
        state.begin_pass();
        for item in self.source.pass() {
            let (i, row) = item?;
            if let Some(r) = state.feed(i, &row) {
                return Ok(r);
            }
        }
        Ok(PassResult::PassComplete)
    }
}

/// Streams `source` until a certificate is produced.
///
/// A dual only covers rows up to the last one streamed; rows after it carry
/// zero weight and callers that know `m` pad with zeros.
pub fn solve_stream<F: Scalar, S: RowSource<F>>(
    source: S,
    lambda: F,
    eps: F,
    mode: StreamMode,
) -> Result<(Outcome<F>, StreamStats)> {
    let mut state = StreamState::new(source.cols(), lambda, eps, mode);
    let mut cursor = StreamCursor::new(source, mode);
    loop {
        match cursor.run_pass(&mut state)? {
            PassResult::Finished(o) => return Ok((o, state.stats)),
            PassResult::PassComplete => return Ok((Outcome::CoveringPrimal(state.primal()), state.stats)),
            PassResult::PhaseEnded => {}
        }
    }
}
