//! Streaming general LPs: rows are normalized on the fly for every guess.

use serde::Serialize;

use crate::certificate::Outcome;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::whack::{PassResult, RowSource, StreamMode, StreamState};

use super::{assemble, check_scales, GeneralSolution, GuessGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GuessScheduling {
    /// Binary search over guesses, one streaming solve at a time.
    Sequential,
    /// Every guess is fed from the same physical scan.
    Interleaved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamReport {
    /// Scans of the underlying source.
    pub physical_passes: u64,
    /// Passes used by each solved guess, indexed by guess.
    pub guess_passes: Vec<Option<u64>>,
    pub guesses: usize,
    /// Largest solver state across guesses, in words.
    pub max_live_words: usize,
}

/// Streaming solve of `min a^T x, C x >= b` where `source` yields rows of `C`.
#[allow(clippy::too_many_arguments)]
pub fn solve_general_stream<F: Scalar, S: RowSource<F>>(
    source: &mut S,
    a: &[F],
    b: &[F],
    lo: F,
    hi: F,
    eps: F,
    mode: StreamMode,
    scheduling: GuessScheduling,
) -> Result<(GeneralSolution<F>, StreamReport)> {
    check_scales("a", a)?;
    check_scales("b", b)?;
    let n = source.cols();
    let grid = GuessGrid::new(n, lo, hi, eps);
    let lambda_prime = hi / (lo * lo);
    let mut states: Vec<Option<StreamState<F>>> = vec![None; grid.len()];
    let mut results: Vec<Option<Outcome<F>>> = vec![None; grid.len()];
    let mut physical = 0u64;

    let mut run = |ks: &[usize], states: &mut Vec<Option<StreamState<F>>>, results: &mut Vec<Option<Outcome<F>>>| -> Result<()> {
        let mut active: Vec<usize> = ks.to_vec();
        for &k in &active {
            states[k] = Some(StreamState::new(n, grid.get(k) * lambda_prime, eps, mode));
        }
        while !active.is_empty() {
            physical += 1;
            let mut open: Vec<usize> = active.clone();
            for &k in &open {
                states[k].as_mut().unwrap().begin_pass();
            }
            for item in source.pass() {
                let (i, row) = item?;
                if open.is_empty() {
                    break;
                }
                let base: Vec<(usize, F)> = row.iter().map(|&(j, v)| (j, v / (a[j] * b[i]))).collect();
                let mut scaled = Vec::with_capacity(base.len());
                open.retain(|&k| {
                    let mu = grid.get(k);
                    scaled.clear();
                    scaled.extend(base.iter().map(|&(j, v)| (j, mu * v)));
                    match states[k].as_mut().unwrap().feed(i, &scaled) {
                        None => true,
                        Some(PassResult::PhaseEnded) => false,
                        Some(PassResult::Finished(o)) => {
                            results[k] = Some(o);
                            false
                        }
                        Some(PassResult::PassComplete) => unreachable!(),
                    }
                });
            }
            for &k in &open {
                results[k] = Some(Outcome::CoveringPrimal(states[k].as_ref().unwrap().primal()));
            }
            active.retain(|&k| results[k].is_none());
        }
        Ok(())
    };

    let top = grid.len() - 1;
    let chosen = match scheduling {
        GuessScheduling::Interleaved => {
            let all: Vec<usize> = (0..grid.len()).collect();
            run(&all, &mut states, &mut results)?;
            (0..grid.len()).find(|&k| results[k].as_ref().is_some_and(Outcome::is_primal)).unwrap_or(top)
        }
        GuessScheduling::Sequential => {
            run(&[top], &mut states, &mut results)?;
            let (mut base, mut hi_k) = (0, top);
            while base < hi_k {
                let mid = base + (hi_k - base) / 2;
                run(&[mid], &mut states, &mut results)?;
                if results[mid].as_ref().unwrap().is_primal() {
                    hi_k = mid;
                } else {
                    base = mid + 1;
                }
            }
            hi_k
        }
    };

    let x = match results[chosen].as_ref().unwrap() {
        Outcome::CoveringPrimal(x) => x.clone(),
        // The top guess exceeds the range of OPT, so this only happens on out-of-range data.
        _ => states[chosen].as_ref().unwrap().primal(),
    };
    let y = match chosen.checked_sub(1).and_then(|k| results[k].as_ref()) {
        Some(Outcome::PackingDual(y)) => {
            let mut y = y.clone();
            y.resize(b.len(), F::zero());
            Some(y)
        }
        _ => None,
    };
    let solved = results.iter().filter(|r| r.is_some()).count();
    let report = StreamReport {
        physical_passes: physical,
        guess_passes: states.iter().map(|s| s.as_ref().map(|s| s.stats().passes)).collect(),
        guesses: grid.len(),
        max_live_words: states.iter().flatten().map(|s| s.stats().max_live_words).max().unwrap_or(0),
    };
    Ok((assemble(a, b, &grid, chosen, &x, y.as_deref(), solved), report))
}
