//! Seeded random instances and monotone update streams.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::SetLine;
use crate::matrix::SparseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform value in `[lo, hi]`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo >= hi {
        return lo;
    }
    (rng.gen_range(lo.ln()..=hi.ln())).exp().clamp(lo, hi)
}

/// `m x n` matrix whose entries are nonzero with probability `density`,
/// log-uniform in `[lo, hi]`. With `cover_rows`, every row gets at least one
/// nonzero.
pub fn random_matrix<R: Rng>(rng: &mut R, m: usize, n: usize, density: f64, lo: f64, hi: f64, cover_rows: bool) -> SparseMatrix<f64> {
    let mut c = SparseMatrix::new(m, n);
    for i in 0..m {
        for j in 0..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                c.set(i, j, log_uniform(rng, lo, hi));
            }
        }
        if cover_rows && n > 0 && c.row(i).is_empty() {
            let j = rng.gen_range(0..n);
            c.set(i, j, log_uniform(rng, lo, hi));
        }
    }
    c
}

/// Covering-template matrix with entries in `[0, lambda]`; zero or `lambda`
/// with some probability so that ties and saturated entries occur.
pub fn random_template<R: Rng>(rng: &mut R, m: usize, n: usize, density: f64, lambda: f64) -> SparseMatrix<f64> {
    let mut c = SparseMatrix::new(m, n);
    for i in 0..m {
        for j in 0..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                let v = if rng.gen_bool(0.1) { lambda } else { rng.gen_range(0.0..lambda) };
                c.set(i, j, v);
            }
        }
    }
    c
}

/// Positive vector of length `len`, log-uniform in `[lo, hi]`.
pub fn random_vector<R: Rng>(rng: &mut R, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| log_uniform(rng, lo, hi)).collect()
}

/// Restricting stream over covering entries: each event lowers a nonzero of
/// `c` to a fraction of its value. Values stay in `[lo, ..]` unless
/// `allow_zero`, where entries may drop to zero as long as their row keeps
/// another nonzero.
pub fn restricting_stream<R: Rng>(rng: &mut R, c: &SparseMatrix<f64>, events: usize, lo: f64, allow_zero: bool) -> Vec<SetLine<f64>> {
    let mut cur = c.clone();
    let mut out = Vec::with_capacity(events);
    for _ in 0..events {
        let live: Vec<(usize, usize, f64)> = cur.triplets().filter(|&(i, _, v)| v > lo || (allow_zero && cur.row(i).len() > 1)).collect();
        let Some(&(i, j, v)) = live.choose(rng) else { break };
        let shrunk = v * rng.gen_range(0.25..0.9);
        let value = if shrunk >= lo {
            shrunk
        } else if v > lo {
            lo
        } else {
            0.0
        };
        cur.set(i, j, value);
        out.push(SetLine::C { row: i, col: j, value });
    }
    out
}

/// Entries halved geometrically, row by row, for `rounds` sweeps.
pub fn halving_stream(c: &SparseMatrix<f64>, rounds: usize) -> Vec<SetLine<f64>> {
    let mut cur = c.clone();
    let mut out = Vec::new();
    for _ in 0..rounds {
        let entries: Vec<_> = cur.triplets().collect();
        for (i, j, v) in entries {
            cur.set(i, j, v / 2.0);
            out.push(SetLine::C { row: i, col: j, value: v / 2.0 });
        }
    }
    out
}

/// Restricting general stream: entry decreases, `b` increases and `a`
/// increases, all kept inside `[lo, hi]` with no covering row emptied.
pub fn general_restricting_stream<R: Rng>(
    rng: &mut R,
    c: &SparseMatrix<f64>,
    a: &[f64],
    b: &[f64],
    events: usize,
    lo: f64,
    hi: f64,
) -> Vec<SetLine<f64>> {
    let (mut c, mut a, mut b) = (c.clone(), a.to_vec(), b.to_vec());
    let mut out = Vec::with_capacity(events);
    for _ in 0..events {
        let roll: f64 = rng.gen();
        if roll < 0.2 {
            let i = rng.gen_range(0..b.len());
            if b[i] < hi {
                b[i] = (b[i] * rng.gen_range(1.01..1.5)).min(hi);
                out.push(SetLine::B { index: i, value: b[i] });
                continue;
            }
        } else if roll < 0.4 {
            let j = rng.gen_range(0..a.len());
            if a[j] < hi {
                a[j] = (a[j] * rng.gen_range(1.01..1.5)).min(hi);
                out.push(SetLine::A { index: j, value: a[j] });
                continue;
            }
        }
        if let Some(SetLine::C { row, col, value }) = restricting_stream(rng, &c, 1, lo, true).pop() {
            c.set(row, col, value);
            out.push(SetLine::C { row, col, value });
        }
    }
    out
}

/// Relaxing stream for a positive LP: covering entries grow, packing entries
/// shrink, and with `translations` packing right-hand sides (`set a i v`) grow
/// and covering right-hand sides (`set b j v`) shrink.
pub fn relaxing_stream<R: Rng>(
    rng: &mut R,
    p: &SparseMatrix<f64>,
    c: &SparseMatrix<f64>,
    events: usize,
    translations: bool,
) -> Vec<SetLine<f64>> {
    let (mut p, mut c) = (p.clone(), c.clone());
    let mut p_rhs = vec![1.0; p.rows()];
    let mut c_rhs = vec![1.0; c.rows()];
    let mut out = Vec::with_capacity(events);
    while out.len() < events {
        let roll: f64 = rng.gen();
        if translations && roll < 0.1 && !p_rhs.is_empty() {
            let i = rng.gen_range(0..p_rhs.len());
            p_rhs[i] *= rng.gen_range(1.01..1.3);
            out.push(SetLine::A { index: i, value: p_rhs[i] });
        } else if translations && roll < 0.2 && !c_rhs.is_empty() {
            let j = rng.gen_range(0..c_rhs.len());
            c_rhs[j] /= rng.gen_range(1.01..1.3);
            out.push(SetLine::B { index: j, value: c_rhs[j] });
        } else if roll < 0.6 && c.rows() > 0 && c.cols() > 0 {
            let (j, k) = (rng.gen_range(0..c.rows()), rng.gen_range(0..c.cols()));
            let old = c.get(j, k);
            let value = if old > 0.0 { old * rng.gen_range(1.05..2.0) } else { rng.gen_range(0.05..0.5) };
            c.set(j, k, value);
            out.push(SetLine::C { row: j, col: k, value });
        } else {
            let live: Vec<_> = p.triplets().collect();
            let Some(&(i, k, v)) = live.choose(rng) else {
                if c.rows() == 0 {
                    break;
                }
                continue;
            };
            let value = if rng.gen_bool(0.1) { 0.0 } else { v * rng.gen_range(0.3..0.95) };
            p.set(i, k, value);
            out.push(SetLine::P { row: i, col: k, value });
        }
    }
    out
}
