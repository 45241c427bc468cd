//! Per-coordinate max-heaps returning a boost length within a factor 4 of
//! the exact one.
//!
//! Each heap `H_k` holds a representative for every nonzero packing entry
//! of column `k` and for every covering entry of column `k` whose row has
//! `C_j x < 2`. Packing representatives may be up to twice the entry and
//! covering representatives down to half of it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Kind {
    Packing,
    Covering,
}

/// Positive `f64`s order like their bit patterns.
fn key(v: f64) -> u64 {
    debug_assert!(v > 0.0);
    v.to_bits()
}

#[derive(Debug, Clone, Default)]
pub struct DeltaHeap {
    heaps: Vec<BTreeSet<(u64, Kind, usize)>>,
    reps: Vec<BTreeMap<(Kind, usize), f64>>,
    readjusts: u64,
}

impl DeltaHeap {
    pub fn new(cols: usize) -> Self {
        Self { heaps: vec![BTreeSet::new(); cols], reps: vec![BTreeMap::new(); cols], readjusts: 0 }
    }

    /// Number of remove-and-reinsert operations caused by drifting entries.
    pub fn readjusts(&self) -> u64 {
        self.readjusts
    }

    pub fn len(&self, k: usize) -> usize {
        self.heaps[k].len()
    }

    pub fn rep(&self, k: usize, kind: Kind, row: usize) -> Option<f64> {
        self.reps[k].get(&(kind, row)).copied()
    }

    pub fn insert(&mut self, k: usize, kind: Kind, row: usize, v: f64) {
        self.remove(k, kind, row);
        if v > 0.0 {
            self.heaps[k].insert((key(v), kind, row));
            self.reps[k].insert((kind, row), v);
        }
    }

    pub fn remove(&mut self, k: usize, kind: Kind, row: usize) {
        if let Some(v) = self.reps[k].remove(&(kind, row)) {
            self.heaps[k].remove(&(key(v), kind, row));
        }
    }

    /// Largest representative in `H_k`.
    pub fn top(&self, k: usize) -> Option<f64> {
        self.heaps[k].last().map(|&(b, _, _)| f64::from_bits(b))
    }

    /// A packing entry of column `k` decreased to `v`.
    pub fn packing_update(&mut self, k: usize, row: usize, v: f64) {
        match self.rep(k, Kind::Packing, row) {
            Some(_) if v <= 0.0 => self.remove(k, Kind::Packing, row),
            Some(r) if r > 2.0 * v => {
                self.readjusts += 1;
                self.insert(k, Kind::Packing, row, v);
            }
            None if v > 0.0 => self.insert(k, Kind::Packing, row, v),
            _ => {}
        }
    }

    /// A covering entry of an active row increased to `v`.
    pub fn covering_update(&mut self, k: usize, row: usize, v: f64) {
        match self.rep(k, Kind::Covering, row) {
            Some(r) if 2.0 * r < v => {
                self.readjusts += 1;
                self.insert(k, Kind::Covering, row, v);
            }
            None if v > 0.0 => self.insert(k, Kind::Covering, row, v),
            _ => {}
        }
    }

    /// Drops every entry of a covering row that reached `C_j x >= 2`.
    pub fn deactivate_row<F: Scalar>(&mut self, row: usize, entries: &[(usize, F)]) {
        for &(k, _) in entries {
            if k < self.heaps.len() {
                self.remove(k, Kind::Covering, row);
            }
        }
    }

    /// `eps / (2 eta top)`, inside `[delta_k / 4, delta_k]`; `None` for an empty heap.
    pub fn query<F: Scalar>(&self, k: usize, eps: F, eta: F) -> Option<F> {
        self.top(k).map(|t| eps / (F::c(2.0) * eta * F::c(t)))
    }
}
