//! Covering template maintained under restricting entry updates.
//!
//! Each coordinate keeps an estimate `z_j = (1+eps)^kappa_j` with
//! `x_j <= z_j <= (1+eps) x_j`, and every row keeps `C z` so that an update
//! to row `i` can be screened in O(1). Rows whose estimate lands in
//! `[1 - eps/2, 1 - eps^2)` are verified with an exact `O(N_i)` dot product
//! before deciding.

use serde::Serialize;

use crate::certificate::{check_certificate, Outcome, Slack};
use crate::error::{Error, Result};
use crate::instance::NormalizedInstance;
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::update::{apply_update, UpdateEvent};

use super::engine::{WhackCore, WhackStats};
use super::step::Side;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DynamicStats {
    #[serde(flatten)]
    pub whack: WhackStats,
    pub updates: u64,
    /// Exact row dots computed to confirm an estimate-based trigger.
    pub verifications: u64,
    pub estimate_refreshes: u64,
}

#[derive(Debug, Clone)]
pub struct DynamicWhackState<F> {
    matrix: SparseMatrix<F>,
    core: WhackCore<F>,
    kappa: Vec<i64>,
    /// `z` in the mantissa frame of the weights.
    z: Vec<F>,
    /// `C z` in the mantissa frame.
    est: Vec<F>,
    terminal: Option<Vec<F>>,
    enforce_log: Vec<u64>,
    refresh_log: Vec<u64>,
    updates: u64,
    verifications: u64,
}

impl<F: Scalar> DynamicWhackState<F> {
    /// Runs the static solver on `inst` and keeps its state for updates.
    pub fn preprocess(inst: &NormalizedInstance<F>) -> (Self, Outcome<F>) {
        let mut s = Self::empty(inst.matrix.clone(), inst.lambda, inst.eps);
        s.rescan();
        let o = s.outcome();
        (s, o)
    }

    /// State over `matrix` before any phase has started.
    pub(crate) fn empty(matrix: SparseMatrix<F>, lambda: F, eps: F) -> Self {
        let (m, n) = (matrix.rows(), matrix.cols());
        let core = WhackCore::new(Side::Covering, n, m, lambda, eps);
        let z = core.weights.mantissas().to_vec();
        let est = matrix.mul(&z);
        Self {
            matrix,
            core,
            kappa: vec![0; n],
            z,
            est,
            terminal: None,
            enforce_log: vec![0; m],
            refresh_log: vec![0; n],
            updates: 0,
            verifications: 0,
        }
    }

    /// Opens the first phase without scanning any rows.
    pub(crate) fn start(&mut self) {
        self.rescan();
    }

    #[cfg(test)]
    pub(crate) fn core_mut(&mut self) -> &mut WhackCore<F> {
        &mut self.core
    }

    pub fn matrix(&self) -> &SparseMatrix<F> {
        &self.matrix
    }

    pub fn core(&self) -> &WhackCore<F> {
        &self.core
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal.is_some()
    }

    /// Current certificate: the frozen dual, or `x_hat / W`.
    pub fn outcome(&self) -> Outcome<F> {
        match &self.terminal {
            Some(y) => Outcome::PackingDual(y.clone()),
            None => Outcome::CoveringPrimal(self.core.relative_primal()),
        }
    }

    pub fn enforce_log(&self) -> &[u64] {
        &self.enforce_log
    }

    pub fn refresh_log(&self) -> &[u64] {
        &self.refresh_log
    }

    pub fn phases(&self) -> u64 {
        self.core.stats.phases
    }

    pub fn stats(&self) -> DynamicStats {
        DynamicStats {
            whack: self.core.stats.clone(),
            updates: self.updates,
            verifications: self.verifications,
            estimate_refreshes: self.refresh_log.iter().sum(),
        }
    }

    /// Absolute estimate `z_j`.
    pub fn estimate(&self, j: usize) -> f64 {
        self.z[j].f64() * 2f64.powi(self.core.weights.exponent())
    }

    /// Estimated `(C z / W)_i`.
    pub fn estimated_ratio(&self, i: usize) -> F {
        self.core.ratio(self.est[i])
    }

    /// Applies a restricting covering update and restores the certificate.
    ///
    /// After the dual is frozen the matrix still changes but the call returns
    /// [`Error::UpdateAfterTerminal`]; the frozen dual stays valid.
    pub fn handle_update(&mut self, event: &UpdateEvent<F>) -> Result<Outcome<F>> {
        let UpdateEvent::RestrictCoveringEntry { row, col, value } = *event else {
            return Err(Error::InvalidValue { what: "restricting covering update", value: f64::NAN });
        };
        let old = apply_update(&mut self.matrix, event)?;
        self.updates += 1;
        self.est[row] = self.est[row] + (value - old) * self.z[col];
        if self.terminal.is_some() {
            return Err(Error::UpdateAfterTerminal);
        }
        self.check_row(row);
        Ok(self.outcome())
    }

    /// Appends a row and restores the certificate over all rows seen so far.
    pub(crate) fn insert_row(&mut self, entries: &[(usize, F)]) -> Result<Outcome<F>> {
        let i = self.matrix.push_row(entries)?;
        let dot = self.core.row_dot(self.matrix.row(i));
        let est = self.matrix.row(i).iter().fold(F::zero(), |a, &(j, v)| a + v * self.z[j]);
        self.est.push(est);
        self.enforce_log.push(0);
        self.core.counts.push(0);
        if self.core.side.violated(self.core.ratio(dot), self.core.eps) {
            self.enforce_and_settle(i);
        }
        Ok(self.outcome())
    }

    fn check_row(&mut self, i: usize) {
        let eps = self.core.eps;
        let est = self.estimated_ratio(i);
        let violated = if est >= F::one() - eps * eps {
            false
        } else if self.core.side.violated(est, eps) {
            true
        } else {
            self.verifications += 1;
            let exact = self.core.row_dot(self.matrix.row(i));
            self.core.side.violated(self.core.ratio(exact), eps)
        };
        if violated {
            self.enforce_and_settle(i);
        }
    }

    fn enforce_and_settle(&mut self, i: usize) {
        self.enforce_row(i);
        if self.core.is_exhausted() {
            self.terminal = Some(self.core.dual());
        } else if self.core.phase_ended() {
            self.rescan();
        }
    }

    fn enforce_row(&mut self, i: usize) {
        let (_, changes) = self.core.enforce(i, self.matrix.row(i));
        self.enforce_log[i] += 1;
        for (j, _) in changes {
            self.refresh_estimate(j);
        }
        if let Some(f) = self.core.renormalize() {
            for v in self.z.iter_mut().chain(self.est.iter_mut()) {
                *v = *v * f;
            }
        }
    }

    /// Raises `z_j` to the smallest power of `1 + eps` not below `x_j`.
    pub fn refresh_estimate(&mut self, j: usize) {
        let x = self.core.weights.mantissa(j);
        if x <= self.z[j] {
            return;
        }
        let base = self.core.eps.ln_1p();
        let ln2 = F::of(2).ln();
        let shift = ln2 * F::from_i32(self.core.weights.exponent()).unwrap();
        let mut k = (self.core.weights.ln_value(j) / base).ceil().to_i64().unwrap();
        let frame = |k: i64| (F::from_i64(k).unwrap() * base - shift).exp();
        while frame(k) < x {
            k += 1;
        }
        while k > self.kappa[j] && frame(k - 1) >= x {
            k -= 1;
        }
        let z = frame(k);
        let dz = z - self.z[j];
        self.kappa[j] = k;
        self.z[j] = z;
        self.refresh_log[j] += 1;
        let col = self.matrix.col(j);
        self.core.stats.column_touches += col.len() as u64;
        for &(r, v) in col {
            self.est[r] = self.est[r] + v * dz;
        }
    }

    /// Starts phases and scans all rows with exact dots until every row is
    /// `(1 - eps/2)`-covered relative to `W` or the dual is reached.
    fn rescan(&mut self) {
        'phase: loop {
            self.core.start_phase();
            self.est = self.matrix.mul(&self.z);
            for i in 0..self.matrix.rows() {
                let dot = self.core.row_dot(self.matrix.row(i));
                if !self.core.side.violated(self.core.ratio(dot), self.core.eps) {
                    continue;
                }
                self.enforce_row(i);
                if self.core.is_exhausted() {
                    self.terminal = Some(self.core.dual());
                    return;
                }
                if self.core.phase_ended() {
                    continue 'phase;
                }
            }
            return;
        }
    }

    /// Checks the estimate sandwich, the estimate caches and the current
    /// certificate. Relative tolerance `1e-9`.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let tol = 1e-9;
        let eps = self.core.eps.f64();
        for j in 0..self.z.len() {
            let (x, z) = (self.core.weights.mantissa(j).f64(), self.z[j].f64());
            if x > z * (1.0 + tol) || z > (1.0 + eps) * x * (1.0 + tol) {
                return Err(format!("estimate sandwich broken at {j}: x = {x}, z = {z}"));
            }
        }
        let dense = self.matrix.mul(&self.z);
        for (i, (&a, &b)) in self.est.iter().zip(&dense).enumerate() {
            if (a - b).abs().f64() > tol * b.f64().max(1e-300) + 1e-12 * self.core.anchor.f64() {
                return Err(format!("row estimate {i} drifted: {a} vs {b}"));
            }
        }
        let slack = Slack::dynamic_covering(eps);
        check_certificate(Some(&self.matrix), None, &self.outcome(), &slack).map_err(|e| e.to_string())
    }
}
