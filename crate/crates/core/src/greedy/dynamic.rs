//! Dynamic greedy solver for positive LPs under relaxing updates.
//!
//! The solver works on the extended LP `(P*, C*)`: `P*` carries one extra
//! column whose variable is held at `1`, and every decrease of a packing
//! entry is compensated on that column so packing weights never drop.
//! Costs are tracked through approximate weights that are refreshed only
//! when they drift by more than a `1 +- eps` factor.

use serde::Serialize;

use crate::certificate::Outcome;
use crate::error::{Error, Result};
use crate::exact::brute_force_delta;
use crate::instance::PositiveInstance;
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::update::{apply_update, UpdateEvent};

use super::heap::{DeltaHeap, Kind};
use super::potentials::eta;
use super::weights::SideWeights;
use super::CHEAP_SLACK;

const AUDIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    /// `C x >= 1` holds; the solution stands for every later relaxing update.
    Solved,
    /// No coordinate is cheap.
    Infeasible,
    Running,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GreedyStats {
    pub boosts: Vec<u64>,
    pub phases: u64,
    pub events: u64,
    pub pseudo_updates: u64,
    /// Approximate weights reset to their exact value.
    pub hat_refreshes: u64,
    pub heap_readjusts: u64,
    pub translations_filtered: u64,
    pub translations_applied: u64,
    /// Entry updates generated by applied translations.
    pub translated_entries: u64,
}

/// Heap-returned boost length next to the exact one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaRecord {
    pub coord: usize,
    pub delta: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Run [`GreedyState::audit`] after construction and after every event.
    pub audit: bool,
    /// Record every heap query next to the exact boost length.
    pub log_deltas: bool,
}

#[derive(Debug, Clone)]
pub struct GreedyState<F> {
    n: usize,
    /// `P*`, `m_p x (n + 1)`, rows divided by the applied right-hand sides.
    p: SparseMatrix<F>,
    /// `C*`, `m_c x n`, rows divided by the applied right-hand sides.
    c: SparseMatrix<F>,
    raw_p: SparseMatrix<F>,
    raw_c: SparseMatrix<F>,
    p_rhs: Vec<F>,
    p_applied: Vec<F>,
    c_rhs: Vec<F>,
    c_applied: Vec<F>,
    /// `x*`, length `n + 1`; the last coordinate stays `1`.
    x: Vec<F>,
    eps: F,
    eta: F,
    pw: SideWeights<F>,
    cw: SideWeights<F>,
    pw_hat: Vec<F>,
    cw_hat: Vec<F>,
    /// `sum_i pw_hat_i P*(i,k)` in the packing frame.
    num: Vec<F>,
    /// `sum_j cw_hat_j C*(j,k)` in the covering frame.
    den: Vec<F>,
    ln_lambda0_hat: F,
    /// `(1 - eps) w_c` at the start of the current phase, covering frame.
    wc_star: F,
    heap: DeltaHeap,
    unsatisfied: usize,
    status: Status,
    stats: GreedyStats,
    options: GreedyOptions,
    deltas: Vec<DeltaRecord>,
    audit_failures: Vec<String>,
}

impl<F: Scalar> GreedyState<F> {
    pub fn new(inst: &PositiveInstance<F>) -> Self {
        Self::with_options(inst, GreedyOptions::default())
    }

    /// Builds the extended LP and runs the initial sweep.
    pub fn with_options(inst: &PositiveInstance<F>, options: GreedyOptions) -> Self {
        let n = inst.n();
        let (m_p, m_c) = (inst.p.rows(), inst.c.rows());
        let eta = eta(m_p, m_c, inst.lo, inst.hi, inst.eps);
        let trip: Vec<_> = inst.p.triplets().collect();
        let p = SparseMatrix::from_triplets(m_p, n + 1, &trip).expect("indices in range");
        let mut x = vec![F::zero(); n + 1];
        x[n] = F::one();
        let pw = SideWeights::new(vec![F::zero(); m_p], eta);
        let cw = SideWeights::new(vec![F::zero(); m_c], -eta);
        let mut heap = DeltaHeap::new(n);
        for (i, k, v) in inst.p.triplets() {
            heap.insert(k, Kind::Packing, i, v.f64());
        }
        for (j, k, v) in inst.c.triplets() {
            heap.insert(k, Kind::Covering, j, v.f64());
        }
        let mut s = Self {
            n,
            pw_hat: (0..m_p).map(|i| pw.weight(i)).collect(),
            cw_hat: (0..m_c).map(|j| cw.weight(j)).collect(),
            p,
            c: inst.c.clone(),
            raw_p: inst.p.clone(),
            raw_c: inst.c.clone(),
            p_rhs: vec![F::one(); m_p],
            p_applied: vec![F::one(); m_p],
            c_rhs: vec![F::one(); m_c],
            c_applied: vec![F::one(); m_c],
            x,
            eps: inst.eps,
            eta,
            pw,
            cw,
            num: vec![F::zero(); n],
            den: vec![F::zero(); n],
            ln_lambda0_hat: F::zero(),
            wc_star: F::zero(),
            heap,
            unsatisfied: m_c,
            status: Status::Running,
            stats: GreedyStats { boosts: vec![0; n], ..GreedyStats::default() },
            options,
            deltas: Vec::new(),
            audit_failures: Vec::new(),
        };
        for k in 0..n {
            s.refresh_cost(k);
        }
        if s.unsatisfied == 0 {
            s.status = Status::Solved;
        } else {
            s.iterate();
        }
        s.maybe_audit("initial sweep");
        s
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn eta(&self) -> F {
        self.eta
    }

    pub fn eps(&self) -> F {
        self.eps
    }

    /// First `n` coordinates of `x*`.
    pub fn x(&self) -> &[F] {
        &self.x[..self.n]
    }

    /// The full `x*`, including the extension coordinate.
    pub fn x_star(&self) -> &[F] {
        &self.x
    }

    /// `P*` including the extension column.
    pub fn p_star(&self) -> &SparseMatrix<F> {
        &self.p
    }

    pub fn c_star(&self) -> &SparseMatrix<F> {
        &self.c
    }

    /// Packing matrix in the caller's scale.
    pub fn raw_p(&self) -> &SparseMatrix<F> {
        &self.raw_p
    }

    /// Covering matrix in the caller's scale.
    pub fn raw_c(&self) -> &SparseMatrix<F> {
        &self.raw_c
    }

    pub fn packing_rhs(&self) -> &[F] {
        &self.p_rhs
    }

    pub fn covering_rhs(&self) -> &[F] {
        &self.c_rhs
    }

    /// Right-hand sides the solver currently works with, `(packing, covering)`.
    pub fn applied_rhs(&self) -> (&[F], &[F]) {
        (&self.p_applied, &self.c_applied)
    }

    pub fn stats(&self) -> GreedyStats {
        GreedyStats { heap_readjusts: self.heap.readjusts(), ..self.stats.clone() }
    }

    pub fn delta_log(&self) -> &[DeltaRecord] {
        &self.deltas
    }

    pub fn audit_failures(&self) -> &[String] {
        &self.audit_failures
    }

    /// `(ln w_p(x*), ln w_c(x*))`.
    pub fn ln_weight_totals(&self) -> (F, F) {
        (self.pw.ln_total(), self.cw.ln_total())
    }

    /// `ln lambda_0(x*) = ln(w_p / w_c)`.
    pub fn ln_lambda0(&self) -> F {
        self.pw.ln_total() - self.cw.ln_total()
    }

    /// Exact covering weights divided by their total.
    pub fn normalized_covering_weights(&self) -> Vec<F> {
        let t = self.cw.total();
        (0..self.cw.len()).map(|j| self.cw.weight(j) / t).collect()
    }

    /// Covering weights divided by the phase estimate `(1 - eps) w_c`.
    pub(crate) fn phase_scaled_covering_weights(&self) -> Vec<F> {
        (0..self.cw.len()).map(|j| self.cw.weight(j) / self.wc_star).collect()
    }

    /// `w*_c / w_c`, which stays within `[1 - eps, 1]` inside a phase.
    pub fn wc_star_ratio(&self) -> F {
        self.wc_star / self.cw.total()
    }

    pub fn outcome(&self) -> Outcome<F> {
        match self.status {
            Status::Solved => Outcome::PositiveSolution(self.x().to_vec()),
            _ => Outcome::Infeasible(None),
        }
    }

    fn rescale_p(&mut self, r: F) {
        self.pw_hat.iter_mut().for_each(|v| *v = *v * r);
        self.num.iter_mut().for_each(|v| *v = *v * r);
    }

    fn rescale_c(&mut self, r: F) {
        self.cw_hat.iter_mut().for_each(|v| *v = *v * r);
        self.den.iter_mut().for_each(|v| *v = *v * r);
        self.wc_star = self.wc_star * r;
    }

    fn set_p_dot(&mut self, i: usize, d: F) {
        if let Some(r) = self.pw.set_dot(i, d) {
            self.rescale_p(r);
        }
    }

    fn set_c_dot(&mut self, j: usize, d: F) {
        if let Some(r) = self.cw.set_dot(j, d) {
            self.rescale_c(r);
        }
    }

    /// Recomputes the approximate cost of coordinate `k` from the approximate weights.
    fn refresh_cost(&mut self, k: usize) {
        self.num[k] = self.p.col(k).iter().fold(F::zero(), |s, &(i, v)| s + self.pw_hat[i] * v);
        self.den[k] = self.c.col(k).iter().fold(F::zero(), |s, &(j, v)| s + self.cw_hat[j] * v);
    }

    /// `lambda_hat(x*, k) <= (1 + 5 eps) lambda_0(x*)`.
    fn cheap(&self, k: usize) -> bool {
        let (num, den) = (self.num[k], self.den[k]);
        if !(den > F::zero()) {
            return false;
        }
        if num == F::zero() {
            return true;
        }
        num.ln() - den.ln() <= self.pw.total().ln() - self.cw.total().ln() + (F::one() + F::c(CHEAP_SLACK) * self.eps).ln()
    }

    fn phase_stale(&self) -> bool {
        self.ln_lambda0_hat < self.ln_lambda0() + (F::one() - self.eps).ln()
    }

    fn iterate(&mut self) {
        loop {
            self.stats.phases += 1;
            self.ln_lambda0_hat = self.ln_lambda0();
            self.wc_star = self.cw.total() * (F::one() - self.eps);
            for k in 0..self.n {
                self.refresh_cost(k);
                self.boost_while_cheap(k);
                if self.status == Status::Solved {
                    return;
                }
            }
            if !self.phase_stale() {
                break;
            }
        }
        self.status = Status::Infeasible;
    }

    fn boost_while_cheap(&mut self, k: usize) {
        while self.status != Status::Solved && self.cheap(k) && self.heap.top(k).is_some() {
            self.boost(k);
        }
    }

    fn boost(&mut self, k: usize) {
        let delta = self.heap.query(k, self.eps, self.eta).expect("nonempty heap");
        if self.options.log_deltas {
            let exact = brute_force_delta(&self.p, &self.c, self.cw.dots(), k, self.eps, self.eta);
            self.deltas.push(DeltaRecord { coord: k, delta: delta.f64(), exact: exact.map_or(f64::NAN, F::f64) });
        }
        self.x[k] = self.x[k] + delta;
        self.stats.boosts[k] += 1;
        let two = F::c(2.0);
        for idx in 0..self.c.col(k).len() {
            let (j, v) = self.c.col(k)[idx];
            let old = self.cw.dot(j);
            let new = old + v * delta;
            if old < F::one() && new >= F::one() {
                self.unsatisfied -= 1;
            }
            if old < two && new >= two {
                self.heap.deactivate_row(j, self.c.row(j));
            }
            self.set_c_dot(j, new);
        }
        for idx in 0..self.p.col(k).len() {
            let (i, v) = self.p.col(k)[idx];
            self.set_p_dot(i, self.pw.dot(i) + v * delta);
        }
        if self.unsatisfied == 0 {
            self.status = Status::Solved;
            return;
        }
        self.update_p_weights(k);
        self.update_c_weights(k);
    }

    fn update_p_weights(&mut self, k: usize) {
        for idx in 0..self.p.col(k).len() {
            let i = self.p.col(k)[idx].0;
            let w = self.pw.weight(i);
            if self.pw_hat[i] < w * (F::one() - self.eps) {
                self.pw_hat[i] = w;
                self.stats.hat_refreshes += 1;
                for e in 0..self.p.row(i).len() {
                    let k2 = self.p.row(i)[e].0;
                    if k2 < self.n {
                        self.refresh_cost(k2);
                    }
                }
            }
        }
    }

    fn refresh_c_hat(&mut self, j: usize) -> bool {
        let w = self.cw.weight(j);
        if self.cw_hat[j] <= w * (F::one() + self.eps) {
            return false;
        }
        self.cw_hat[j] = w;
        self.stats.hat_refreshes += 1;
        for e in 0..self.c.row(j).len() {
            let k2 = self.c.row(j)[e].0;
            self.refresh_cost(k2);
        }
        true
    }

    fn update_c_weights(&mut self, k: usize) {
        for idx in 0..self.c.col(k).len() {
            let j = self.c.col(k)[idx].0;
            self.refresh_c_hat(j);
        }
    }

    /// Boosts the candidates, then starts a new phase if `lambda_0` drifted.
    fn settle(&mut self, candidates: &[usize]) {
        if self.status == Status::Solved {
            return;
        }
        self.status = Status::Running;
        for &k in candidates {
            self.boost_while_cheap(k);
            if self.status == Status::Solved {
                return;
            }
        }
        if self.phase_stale() {
            self.iterate();
        } else {
            self.status = Status::Infeasible;
        }
    }

    /// `P*(i, k)` decreases to `value`; the extension column absorbs the change in `P*_i x*`.
    fn relax_p(&mut self, i: usize, k: usize, value: F) {
        let old = self.p.get(i, k);
        if !(value < old) {
            return;
        }
        self.p.set(i, k, value);
        if self.x[k] > F::zero() {
            let ext = self.p.get(i, self.n) + (old - value) * self.x[k];
            self.p.set(i, self.n, ext);
            self.stats.pseudo_updates += 1;
        }
        self.heap.packing_update(k, i, value.f64());
        if self.status == Status::Solved {
            return;
        }
        self.refresh_cost(k);
        self.settle(&[k]);
    }

    /// `C*(j, k)` increases to `value`.
    fn relax_c(&mut self, j: usize, k: usize, value: F) {
        let old = self.c.get(j, k);
        if !(value > old) {
            return;
        }
        self.c.set(j, k, value);
        let two = F::c(2.0);
        let before = self.cw.dot(j);
        let after = before + (value - old) * self.x[k];
        if before < F::one() && after >= F::one() {
            self.unsatisfied -= 1;
        }
        self.set_c_dot(j, after);
        if before < two && after >= two {
            self.heap.deactivate_row(j, self.c.row(j));
        } else if after < two {
            self.heap.covering_update(k, j, value.f64());
        }
        if self.status == Status::Solved {
            return;
        }
        if self.unsatisfied == 0 {
            self.status = Status::Solved;
            return;
        }
        let mut candidates = Vec::new();
        if self.refresh_c_hat(j) {
            candidates.extend(self.c.row(j).iter().map(|e| e.0));
        }
        self.refresh_cost(k);
        candidates.push(k);
        self.settle(&candidates);
    }

    /// Applies a relaxing entry update given in the caller's scale.
    pub fn handle_relaxing(&mut self, event: &UpdateEvent<F>) -> Result<Outcome<F>> {
        match *event {
            UpdateEvent::RelaxPackingEntry { row, col, .. } => {
                apply_update(&mut self.raw_p, event)?;
                self.stats.events += 1;
                let v = self.raw_p.get(row, col) / self.p_applied[row];
                self.relax_p(row, col, v);
            }
            UpdateEvent::RelaxCoveringEntry { row, col, .. } => {
                apply_update(&mut self.raw_c, event)?;
                self.stats.events += 1;
                let v = self.raw_c.get(row, col) / self.c_applied[row];
                self.relax_c(row, col, v);
            }
            _ => return Err(Error::InvalidValue { what: "relaxing entry update", value: f64::NAN }),
        }
        self.maybe_audit("entry update");
        Ok(self.outcome())
    }

    /// Raises a packing right-hand side or lowers a covering one. The change
    /// is held back until it reaches a `1 + eps` factor, then applied by
    /// rescaling the row.
    pub fn handle_translation(&mut self, event: &UpdateEvent<F>) -> Result<Outcome<F>> {
        let grow = F::one() + self.eps;
        match *event {
            UpdateEvent::TranslatePacking { row, value } => {
                let old = *self.p_rhs.get(row).ok_or(Error::IndexOutOfRange { row, col: 0, m: self.p_rhs.len(), n: 0 })?;
                if !(value > old) || !value.is_finite() {
                    return Err(Error::NonMonotoneUpdate { row, col: usize::MAX, old: old.f64(), new: value.f64() });
                }
                self.stats.events += 1;
                self.p_rhs[row] = value;
                if value >= self.p_applied[row] * grow {
                    self.p_applied[row] = value;
                    self.stats.translations_applied += 1;
                    let entries = self.raw_p.row(row).to_vec();
                    self.stats.translated_entries += entries.len() as u64;
                    for (k, v) in entries {
                        self.relax_p(row, k, v / value);
                    }
                } else {
                    self.stats.translations_filtered += 1;
                }
            }
            UpdateEvent::TranslateCovering { row, value } => {
                let old = *self.c_rhs.get(row).ok_or(Error::IndexOutOfRange { row, col: 0, m: self.c_rhs.len(), n: 0 })?;
                if !(value < old) || !(value > F::zero()) {
                    return Err(Error::NonMonotoneUpdate { row, col: usize::MAX, old: old.f64(), new: value.f64() });
                }
                self.stats.events += 1;
                self.c_rhs[row] = value;
                if value * grow <= self.c_applied[row] {
                    self.c_applied[row] = value;
                    self.stats.translations_applied += 1;
                    let entries = self.raw_c.row(row).to_vec();
                    self.stats.translated_entries += entries.len() as u64;
                    for (k, v) in entries {
                        self.relax_c(row, k, v / value);
                    }
                } else {
                    self.stats.translations_filtered += 1;
                }
            }
            _ => return Err(Error::InvalidValue { what: "relaxing translation update", value: f64::NAN }),
        }
        self.maybe_audit("translation update");
        Ok(self.outcome())
    }

    /// Dispatches to [`Self::handle_relaxing`] or [`Self::handle_translation`].
    pub fn handle_event(&mut self, event: &UpdateEvent<F>) -> Result<Outcome<F>> {
        match event {
            UpdateEvent::RelaxPackingEntry { .. } | UpdateEvent::RelaxCoveringEntry { .. } => self.handle_relaxing(event),
            UpdateEvent::TranslatePacking { .. } | UpdateEvent::TranslateCovering { .. } => self.handle_translation(event),
            _ => Err(Error::InvalidValue { what: "restricting update on a positive LP", value: f64::NAN }),
        }
    }

    fn maybe_audit(&mut self, when: &str) {
        if self.options.audit {
            if let Err(e) = self.audit() {
                self.audit_failures.push(format!("after {when} #{}: {e}", self.stats.events));
            }
        }
    }

    /// Recomputes every maintained quantity and checks the approximate-weight
    /// sandwiches, the cost formula, the phase estimate and the heap bracket.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let tol = F::c(AUDIT_TOL);
        let close = |a: F, b: F| (a - b).abs() <= tol * a.abs().max(b.abs()) + F::c(1e-300);
        for (i, &d) in self.p.mul(&self.x).iter().enumerate() {
            if !close(d, self.pw.dot(i)) {
                return Err(format!("packing row {i}: dot {} but {} maintained", d, self.pw.dot(i)));
            }
        }
        for (j, &d) in self.c.mul_by_cols(&self.x[..self.n]).iter().enumerate() {
            if !close(d, self.cw.dot(j)) {
                return Err(format!("covering row {j}: dot {} but {} maintained", d, self.cw.dot(j)));
            }
        }
        if !close(self.pw.total(), self.pw.exact_total()) || !close(self.cw.total(), self.cw.exact_total()) {
            return Err("weight totals drifted".into());
        }
        if self.status == Status::Solved {
            // Approximate weights are frozen once solved.
            return Ok(());
        }
        let up = F::one() + tol;
        for j in 0..self.cw.len() {
            let (w, h) = (self.cw.weight(j), self.cw_hat[j]);
            if !(w <= h * up && h <= w * (F::one() + self.eps) * up) {
                return Err(format!("covering row {j}: w_c = {w}, w_c_hat = {h}"));
            }
        }
        for i in 0..self.pw.len() {
            let (w, h) = (self.pw.weight(i), self.pw_hat[i]);
            if !(h <= w * up && h * up >= w * (F::one() - self.eps)) {
                return Err(format!("packing row {i}: w_p = {w}, w_p_hat = {h}"));
            }
        }
        for k in 0..self.n {
            let num = self.p.col(k).iter().fold(F::zero(), |s, &(i, v)| s + self.pw_hat[i] * v);
            let den = self.c.col(k).iter().fold(F::zero(), |s, &(j, v)| s + self.cw_hat[j] * v);
            if !close(num, self.num[k]) || !close(den, self.den[k]) {
                return Err(format!("coordinate {k}: cost terms ({}, {}) but ({num}, {den}) expected", self.num[k], self.den[k]));
            }
        }
        if self.phase_stale() && self.ln_lambda0_hat.is_finite() {
            let gap = self.ln_lambda0() + (F::one() - self.eps).ln() - self.ln_lambda0_hat;
            if gap > tol {
                return Err(format!("lambda_0 estimate too low by ln-factor {gap}"));
            }
        }
        for k in 0..self.n {
            let exact = brute_force_delta(&self.p, &self.c, self.cw.dots(), k, self.eps, self.eta);
            let got = self.heap.query(k, self.eps, self.eta);
            match (exact, got) {
                (Some(e), Some(g)) if g <= e * up && g * up >= e / F::c(4.0) => {}
                (None, None) => {}
                (e, g) => return Err(format!("coordinate {k}: heap delta {g:?} vs exact {e:?}")),
            }
        }
        Ok(())
    }
}
