//! Dense tableau simplex with Bland's rule, exact arithmetic.

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

use super::{to_exact, vec_to_exact, ExactField, ExactLpResult, MAX_DIM};

/// `max c^T v` subject to `A v <= rhs`, `v >= 0`, with `rhs >= 0`.
#[derive(Debug, Clone)]
pub struct Lp<Q> {
    pub a: Vec<Vec<Q>>,
    pub rhs: Vec<Q>,
    pub c: Vec<Q>,
}

/// Optimum of an [`Lp`]: value, primal `v` and the constraint duals.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<Q> {
    pub value: Q,
    pub primal: Vec<Q>,
    pub dual: Vec<Q>,
}

/// Solves `lp` starting from the origin. `None` when unbounded.
pub fn maximize<Q: ExactField>(lp: &Lp<Q>) -> Option<Solution<Q>> {
    let rows = lp.a.len();
    let vars = lp.c.len();
    let width = vars + rows;
    assert!(lp.rhs.iter().all(|r| !r.is_negative()), "origin must be feasible");
    let mut t: Vec<Vec<Q>> = (0..rows)
        .map(|r| {
            let mut row = lp.a[r].clone();
            row.extend((0..rows).map(|s| if s == r { Q::one() } else { Q::zero() }));
            row.push(lp.rhs[r].clone());
            row
        })
        .collect();
    let mut obj: Vec<Q> = lp.c.iter().map(|v| -v.clone()).collect();
    obj.extend((0..=rows).map(|_| Q::zero()));
    let mut basis: Vec<usize> = (vars..width).collect();
    while let Some(enter) = (0..width).find(|&k| obj[k].is_negative()) {
        let mut leave: Option<usize> = None;
        for r in 0..rows {
            if !t[r][enter].is_positive() {
                continue;
            }
            leave = match leave {
                None => Some(r),
                Some(b) => {
                    let lhs = t[r][width].clone() * t[b][enter].clone();
                    let rhs = t[b][width].clone() * t[r][enter].clone();
                    if lhs < rhs || (lhs == rhs && basis[r] < basis[b]) {
                        Some(r)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let r = leave?;
        let piv = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let prow = t[r].clone();
        for (q, row) in t.iter_mut().enumerate() {
            if q != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (v, p) in obj.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
        basis[r] = enter;
    }
    let mut primal = vec![Q::zero(); vars];
    for (r, &b) in basis.iter().enumerate() {
        if b < vars {
            primal[b] = t[r][width].clone();
        }
    }
    Some(Solution { value: obj[width].clone(), primal, dual: obj[vars..width].to_vec() })
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m > MAX_DIM || n > MAX_DIM {
        return Err(Error::TooLarge { m, n });
    }
    Ok(())
}

/// `min a^T x` subject to `C x >= b`, `x >= 0` with `a > 0`.
///
/// Solved through the packing dual `max b^T y`, `C^T y <= a`; the covering
/// solution is read from the dual values of the packing constraints.
pub fn solve_covering_exact<F: Scalar, Q: ExactField>(
    c: &SparseMatrix<F>,
    a: &[F],
    b: &[F],
) -> Result<ExactLpResult<Q>> {
    check_dims(c.rows(), c.cols())?;
    let Some(sol) = packing_side::<F, Q>(c, a, b) else {
        return Ok(ExactLpResult::Infeasible);
    };
    Ok(ExactLpResult::Optimal { value: sol.value, x: sol.dual })
}

/// `max b^T y` subject to `C^T y <= a`, `y >= 0`.
pub fn solve_packing_exact<F: Scalar, Q: ExactField>(
    c: &SparseMatrix<F>,
    a: &[F],
    b: &[F],
) -> Result<ExactLpResult<Q>> {
    check_dims(c.rows(), c.cols())?;
    Ok(match packing_side::<F, Q>(c, a, b) {
        Some(sol) => ExactLpResult::Optimal { value: sol.value, x: sol.primal },
        None => ExactLpResult::Unbounded,
    })
}

fn packing_side<F: Scalar, Q: ExactField>(c: &SparseMatrix<F>, a: &[F], b: &[F]) -> Option<Solution<Q>> {
    let dense: Vec<Vec<Q>> = to_exact(c);
    let at: Vec<Vec<Q>> = (0..c.cols()).map(|j| (0..c.rows()).map(|i| dense[i][j].clone()).collect()).collect();
    let lp = Lp { a: at, rhs: vec_to_exact(a), c: vec_to_exact(b) };
    maximize(&lp)
}

/// Decides whether some `x >= 0` has `P x <= (1 + s) 1` and `C x >= 1`.
///
/// Maximizes `theta` subject to `theta 1 - C x <= 0`, `P x <= 1 + s`,
/// `theta <= 1`; the system is feasible iff the optimum is `1`.
pub fn positive_feasible_exact<F: Scalar, Q: ExactField>(
    p: &SparseMatrix<F>,
    c: &SparseMatrix<F>,
    s: Q,
) -> Result<Option<Vec<Q>>> {
    let n = p.cols().max(c.cols());
    check_dims(p.rows() + c.rows(), n)?;
    let pd: Vec<Vec<Q>> = to_exact(p);
    let cd: Vec<Vec<Q>> = to_exact(c);
    let mut a = Vec::new();
    let mut rhs = Vec::new();
    for row in &cd {
        let mut r = vec![Q::one()];
        r.extend(row.iter().map(|v| -v.clone()));
        a.push(r);
        rhs.push(Q::zero());
    }
    for row in &pd {
        let mut r = vec![Q::zero()];
        r.extend(row.iter().cloned());
        a.push(r);
        rhs.push(Q::one() + s.clone());
    }
    let mut cap = vec![Q::zero(); n + 1];
    cap[0] = Q::one();
    a.push(cap);
    rhs.push(Q::one());
    let mut obj = vec![Q::zero(); n + 1];
    obj[0] = Q::one();
    let sol = maximize(&Lp { a, rhs, c: obj }).expect("theta is bounded");
    Ok((sol.value == Q::one()).then(|| sol.primal[1..].to_vec()))
}
