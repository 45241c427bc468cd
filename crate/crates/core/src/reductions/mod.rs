//! Reductions from general covering LPs `min a^T x, C x >= b` to the
//! normalized covering template, by scaling and guessing the optimum.

mod dynamic;
mod online;
mod stream;

use serde::Serialize;

use crate::certificate::Outcome;
use crate::error::{Error, Result};
use crate::instance::{GeneralInstance, NormalizedInstance};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::whack::solve_fast;

pub use dynamic::{GeneralDynamic, ReductionCounters};
pub use online::{GeneralOnline, OnlineReport};
pub use stream::{solve_general_stream, GuessScheduling, StreamReport};

/// `C'_{ij} = C_ij / (a_j b_i)` with the entry bound `U / L^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedView<F> {
    pub c_prime: SparseMatrix<F>,
    pub lambda_prime: F,
}

impl<F: Scalar> NormalizedView<F> {
    /// The template instance for guess `mu`: `C'' = mu C'`, `lambda'' = mu lambda'`.
    pub fn guess_instance(&self, mu: F, eps: F) -> NormalizedInstance<F> {
        NormalizedInstance::new(self.c_prime.map_values(|_, _, v| mu * v), mu * self.lambda_prime, eps)
    }
}

fn check_scales<F: Scalar>(which: &'static str, v: &[F]) -> Result<()> {
    match v.iter().position(|&x| !(x > F::zero())) {
        Some(index) => Err(Error::ZeroScaleFactor { which, index }),
        None => Ok(()),
    }
}

fn check_rows<F: Scalar>(c: &SparseMatrix<F>) -> Result<()> {
    match (0..c.rows()).find(|&i| c.row(i).is_empty()) {
        Some(i) => Err(Error::InvalidValue { what: "empty covering row", value: i as f64 }),
        None => Ok(()),
    }
}

pub fn normalize<F: Scalar>(inst: &GeneralInstance<F>) -> Result<NormalizedView<F>> {
    check_scales("a", &inst.a)?;
    check_scales("b", &inst.b)?;
    let c_prime = inst.c.map_values(|i, j, v| v / (inst.a[j] * inst.b[i]));
    let bound = inst.hi / (inst.lo * inst.lo);
    Ok(NormalizedView { lambda_prime: bound.max(c_prime.max_entry()), c_prime })
}

/// Geometric guesses `mu_k = (L^2/U) (1+eps)^k` for the optimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuessGrid<F> {
    pub guesses: Vec<F>,
    pub eps: F,
}

impl<F: Scalar> GuessGrid<F> {
    /// Covers `[L^2/U, n U^2/L]` with `ceil(log_{1+eps}(n U^3 / L^3)) + 1` guesses.
    pub fn new(n: usize, lo: F, hi: F, eps: F) -> Self {
        let first = lo * lo / hi;
        let span = F::of(n) * (hi / lo).powi(3);
        let k = (span.ln() / eps.ln_1p()).ceil().max(F::zero()).to_usize().unwrap();
        let mut g = Self { guesses: vec![first], eps };
        g.extend_to(k + 1);
        g
    }

    /// Same grid with `extra` guesses appended above the top.
    pub fn padded(n: usize, lo: F, hi: F, eps: F, extra: usize) -> Self {
        let mut g = Self::new(n, lo, hi, eps);
        let len = g.len() + extra;
        g.extend_to(len);
        g
    }

    /// Number of padding guesses needed so the top guess exceeds the range by `1 + 4 eps`.
    pub fn dual_padding(eps: F) -> usize {
        ((F::one() + F::c(4.0) * eps).ln() / eps.ln_1p()).ceil().to_usize().unwrap() + 1
    }

    pub fn extend_to(&mut self, len: usize) {
        let first = self.guesses[0];
        while self.guesses.len() < len {
            let k = self.guesses.len() as i32;
            self.guesses.push(first * (F::one() + self.eps).powi(k));
        }
    }

    pub fn len(&self) -> usize {
        self.guesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guesses.is_empty()
    }

    pub fn get(&self, k: usize) -> F {
        self.guesses[k]
    }
}

/// Primal and dual of the original LP recovered from the template.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralSolution<F> {
    /// Covering solution with `C x >= (1 - eps) b`.
    pub x: Vec<F>,
    /// `a^T x`.
    pub objective: F,
    /// Packing solution with `C^T y <= a`, when a smaller guess produced one.
    pub y: Option<Vec<F>>,
    /// `b^T y`.
    pub dual_objective: Option<F>,
    pub guess: F,
    pub guess_index: usize,
    pub guesses_solved: usize,
}

/// `x_j = mu x''_j / a_j`.
pub fn primal_from_template<F: Scalar>(x: &[F], mu: F, a: &[F]) -> Vec<F> {
    x.iter().zip(a).map(|(&v, &aj)| mu * v / aj).collect()
}

/// `y_i = mu y''_i / (b_i (1 + 4 eps))`.
pub fn dual_from_template<F: Scalar>(y: &[F], mu: F, b: &[F], eps: F) -> Vec<F> {
    let s = F::one() + F::c(4.0) * eps;
    y.iter().zip(b).map(|(&v, &bi)| mu * v / (bi * s)).collect()
}

fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |s, (&p, &q)| s + p * q)
}

/// Builds the solution from the smallest primal guess `k` and, if `k > 0`,
/// the dual of guess `k - 1`.
fn assemble<F: Scalar>(
    inst_a: &[F],
    inst_b: &[F],
    grid: &GuessGrid<F>,
    k: usize,
    x_template: &[F],
    y_template: Option<&[F]>,
    solved: usize,
) -> GeneralSolution<F> {
    let mu = grid.get(k);
    let x = primal_from_template(x_template, mu, inst_a);
    let y = y_template.map(|y| dual_from_template(y, grid.get(k - 1), inst_b, grid.eps));
    GeneralSolution {
        objective: dot(inst_a, &x),
        dual_objective: y.as_ref().map(|y| dot(inst_b, y)),
        x,
        y,
        guess: mu,
        guess_index: k,
        guesses_solved: solved,
    }
}

/// Binary search for the smallest guess whose template solve returns a primal.
pub fn solve_general_static<F: Scalar>(inst: &GeneralInstance<F>, eps: F) -> Result<GeneralSolution<F>> {
    check_rows(&inst.c)?;
    let view = normalize(inst)?;
    let mut grid = GuessGrid::new(inst.c.cols(), inst.lo, inst.hi, eps);
    let mut solved = 0;
    let mut solve = |grid: &GuessGrid<F>, k: usize| {
        solved += 1;
        solve_fast(&view.guess_instance(grid.get(k), eps)).0
    };
    // A guess above OPT (1 + 4 eps) cannot return a dual; grow the grid until one is primal.
    let mut hi = grid.len() - 1;
    let mut hi_x = loop {
        match solve(&grid, hi) {
            Outcome::CoveringPrimal(x) => break x,
            _ => {
                grid.extend_to(grid.len() + 1);
                hi = grid.len() - 1;
            }
        }
    };
    let mut lo: Option<(usize, Vec<F>)> = None;
    loop {
        let base = lo.as_ref().map_or(0, |(l, _)| l + 1);
        if base >= hi {
            break;
        }
        let mid = base + (hi - base) / 2;
        match solve(&grid, mid) {
            Outcome::CoveringPrimal(x) => {
                hi = mid;
                hi_x = x;
            }
            Outcome::PackingDual(y) => lo = Some((mid, y)),
            other => unreachable!("unexpected outcome {other:?}"),
        }
    }
    let y = lo.as_ref().map(|(_, y)| y.as_slice());
    Ok(assemble(&inst.a, &inst.b, &grid, hi, &hi_x, y, solved))
}
