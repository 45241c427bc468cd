//! Tagged solver outcomes and their certificate checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::{Scalar, CHECK_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<F> {
    /// `x` with `C x >= (1 - eps) 1`.
    CoveringPrimal(Vec<F>),
    /// `y` with `C^T y <= (1 + 4 eps) 1`.
    PackingDual(Vec<F>),
    /// `x` with `P x <= (1 + eps) 1` from the packing template.
    PackingPrimal(Vec<F>),
    /// `y` with `P^T y >= (1 - 4 eps) 1` from the packing template.
    CoveringDual(Vec<F>),
    /// `x` with `P x <= (1 + 200 eps) 1` and `C x >= 1`.
    PositiveSolution(Vec<F>),
    /// No solution exists; optionally carries a dual witness.
    Infeasible(Option<Vec<F>>),
    /// Primal-only streaming ran out of rounds.
    Null,
}

impl<F: Scalar> Outcome<F> {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::CoveringPrimal(_) => "CoveringPrimal",
            Outcome::PackingDual(_) => "PackingDual",
            Outcome::PackingPrimal(_) => "PackingPrimal",
            Outcome::CoveringDual(_) => "CoveringDual",
            Outcome::PositiveSolution(_) => "PositiveSolution",
            Outcome::Infeasible(_) => "Infeasible",
            Outcome::Null => "Null",
        }
    }

    pub fn vector(&self) -> Option<&[F]> {
        match self {
            Outcome::CoveringPrimal(v)
            | Outcome::PackingDual(v)
            | Outcome::PackingPrimal(v)
            | Outcome::CoveringDual(v)
            | Outcome::PositiveSolution(v) => Some(v),
            Outcome::Infeasible(v) => v.as_deref(),
            Outcome::Null => None,
        }
    }

    pub fn is_primal(&self) -> bool {
        matches!(self, Outcome::CoveringPrimal(_) | Outcome::PackingPrimal(_) | Outcome::PositiveSolution(_))
    }
}

/// Slack constants applied by [`check_certificate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slack {
    /// Allowed range of `1^T x` for primal vectors.
    pub primal_mass: (f64, f64),
    /// Covering primal: `C x >= cover_floor`.
    pub cover_floor: f64,
    /// Packing primal: `P x <= pack_ceiling`.
    pub pack_ceiling: f64,
    /// Allowed range of `1^T y` for dual vectors.
    pub dual_mass: (f64, f64),
    /// Packing dual: `C^T y <= dual_ceiling`.
    pub dual_ceiling: f64,
    /// Covering dual: `P^T y >= dual_floor`.
    pub dual_floor: f64,
    /// Positive solution: `P x <= positive_ceiling`, `C x >= 1`.
    pub positive_ceiling: f64,
}

impl Slack {
    /// Static covering template.
    pub fn covering(eps: f64) -> Self {
        Self {
            primal_mass: (1.0, 1.0),
            cover_floor: 1.0 - eps,
            pack_ceiling: f64::INFINITY,
            dual_mass: (1.0, 1.0),
            dual_ceiling: 1.0 + 4.0 * eps,
            dual_floor: 0.0,
            positive_ceiling: f64::INFINITY,
        }
    }

    /// Maintained covering solutions, where `1^T x` may reach `1 + eps`.
    pub fn dynamic_covering(eps: f64) -> Self {
        Self { primal_mass: (0.0, 1.0 + eps), ..Self::covering(eps) }
    }

    /// Online covering solutions with the raw phase slack `(1 - eps/2)^-1`.
    pub fn online_covering(eps: f64) -> Self {
        Self { primal_mass: (0.0, 1.0 / (1.0 - eps / 2.0)), ..Self::covering(eps) }
    }

    /// Packing template.
    pub fn packing(eps: f64) -> Self {
        Self {
            primal_mass: (1.0, 1.0),
            cover_floor: f64::NEG_INFINITY,
            pack_ceiling: 1.0 + eps,
            dual_mass: (1.0, 1.0),
            dual_ceiling: f64::INFINITY,
            dual_floor: 1.0 - 4.0 * eps,
            positive_ceiling: f64::INFINITY,
        }
    }

    /// Positive LP solutions.
    pub fn positive(eps: f64) -> Self {
        Self { positive_ceiling: 1.0 + 200.0 * eps, ..Self::covering(eps) }
    }

    /// Duals extracted from the greedy solver: `1^T y >= 1`, `C^T y <= 1 + 5 eps`.
    pub fn extracted_dual(eps: f64) -> Self {
        Self { dual_mass: (1.0, f64::INFINITY), dual_ceiling: 1.0 + 5.0 * eps, ..Self::covering(eps) }
    }
}

fn violation(msg: String) -> Error {
    Error::CertificateViolation(msg)
}

fn need<'a, F>(m: Option<&'a SparseMatrix<F>>, what: &str) -> Result<&'a SparseMatrix<F>> {
    m.ok_or_else(|| violation(format!("outcome needs the {what} matrix")))
}

fn check_len<F>(v: &[F], want: usize, what: &str) -> Result<()> {
    if v.len() != want {
        return Err(violation(format!("{what} has length {} but {want} expected", v.len())));
    }
    Ok(())
}

fn check_nonneg_mass<F: Scalar>(v: &[F], range: (f64, f64), what: &str) -> Result<()> {
    if let Some((k, x)) = v.iter().enumerate().find(|(_, x)| !(x.f64() >= 0.0) || !x.is_finite()) {
        return Err(violation(format!("{what}[{k}] = {x} is negative or not finite")));
    }
    let mass: f64 = v.iter().map(|x| x.f64()).sum();
    if mass < range.0 - CHECK_TOL || mass > range.1 + CHECK_TOL {
        return Err(violation(format!("1^T {what} = {mass} outside [{}, {}]", range.0, range.1)));
    }
    Ok(())
}

/// Checks `outcome` against the covering matrix `c` and, for positive
/// solutions and packing-template outcomes, the packing matrix `p`.
pub fn check_certificate<F: Scalar>(
    c: Option<&SparseMatrix<F>>,
    p: Option<&SparseMatrix<F>>,
    outcome: &Outcome<F>,
    slack: &Slack,
) -> Result<()> {
    let worst_below = |vals: Vec<F>, floor: f64, what: &str| -> Result<()> {
        let bad = vals.iter().enumerate().map(|(i, v)| (i, v.f64())).filter(|(_, v)| *v < floor - CHECK_TOL);
        if let Some((i, v)) = bad.min_by(|a, b| a.1.total_cmp(&b.1)) {
            return Err(violation(format!("{what} row {i}: {v} < {floor}")));
        }
        Ok(())
    };
    let worst_above = |vals: Vec<F>, ceil: f64, what: &str| -> Result<()> {
        let bad = vals.iter().enumerate().map(|(i, v)| (i, v.f64())).filter(|(_, v)| *v > ceil + CHECK_TOL);
        if let Some((i, v)) = bad.max_by(|a, b| a.1.total_cmp(&b.1)) {
            return Err(violation(format!("{what} row {i}: {v} > {ceil}")));
        }
        Ok(())
    };
    match outcome {
        Outcome::CoveringPrimal(x) => {
            let c = need(c, "covering")?;
            check_len(x, c.cols(), "x")?;
            check_nonneg_mass(x, slack.primal_mass, "x")?;
            worst_below(c.mul(x), slack.cover_floor, "Cx")
        }
        Outcome::PackingDual(y) => {
            let c = need(c, "covering")?;
            check_len(y, c.rows(), "y")?;
            check_nonneg_mass(y, slack.dual_mass, "y")?;
            worst_above(c.tmul(y), slack.dual_ceiling, "C^T y")
        }
        Outcome::PackingPrimal(x) => {
            let p = need(p, "packing")?;
            check_len(x, p.cols(), "x")?;
            check_nonneg_mass(x, slack.primal_mass, "x")?;
            worst_above(p.mul(x), slack.pack_ceiling, "Px")
        }
        Outcome::CoveringDual(y) => {
            let p = need(p, "packing")?;
            check_len(y, p.rows(), "y")?;
            check_nonneg_mass(y, slack.dual_mass, "y")?;
            worst_below(p.tmul(y), slack.dual_floor, "P^T y")
        }
        Outcome::PositiveSolution(x) => {
            let (p, c) = (need(p, "packing")?, need(c, "covering")?);
            check_len(x, c.cols(), "x")?;
            check_nonneg_mass(x, (0.0, f64::INFINITY), "x")?;
            worst_above(p.mul(x), slack.positive_ceiling, "Px")?;
            worst_below(c.mul(x), 1.0, "Cx")
        }
        Outcome::Infeasible(_) | Outcome::Null => Ok(()),
    }
}
