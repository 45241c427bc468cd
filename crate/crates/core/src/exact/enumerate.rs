//! Vertex enumeration: the second exact route, for tiny instances.

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;

use super::{to_exact, vec_to_exact, ExactField, ExactLpResult};

/// Largest number of candidate vertices examined.
const MAX_SUBSETS: u64 = 200_000;

/// Constraint `coef . x >= rhs` (or `<=` when `upper`).
struct Halfspace<Q> {
    coef: Vec<Q>,
    rhs: Q,
    upper: bool,
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k as u64).fold(1u64, |acc, i| acc.saturating_mul(n as u64 - i) / (i + 1))
}

/// Solves the square system `rows x = rhs`; `None` when singular.
fn solve_square<Q: ExactField>(rows: &[&Halfspace<Q>]) -> Option<Vec<Q>> {
    let n = rows.len();
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .map(|h| {
            let mut r = h.coef.clone();
            r.push(h.rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, q) in row.iter_mut().zip(&prow) {
                    *v = v.clone() - f.clone() * q.clone();
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

fn satisfies<Q: ExactField>(h: &Halfspace<Q>, x: &[Q]) -> bool {
    let lhs = h.coef.iter().zip(x).fold(Q::zero(), |s, (a, b)| s + a.clone() * b.clone());
    if h.upper {
        lhs <= h.rhs
    } else {
        lhs >= h.rhs
    }
}

/// Calls `visit` on every vertex of `{x : all halfspaces}` in `R^n`.
fn vertices<Q: ExactField>(hs: &[Halfspace<Q>], n: usize, mut visit: impl FnMut(Vec<Q>)) -> Result<()> {
    if binomial(hs.len(), n) > MAX_SUBSETS {
        return Err(Error::TooLarge { m: hs.len(), n });
    }
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<&Halfspace<Q>> = pick.iter().map(|&k| &hs[k]).collect();
        if let Some(x) = solve_square(&rows) {
            if hs.iter().all(|h| satisfies(h, &x)) {
                visit(x);
            }
        }
        // Next n-subset in lexicographic order.
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            if pick[k] < hs.len() - n + k {
                pick[k] += 1;
                for q in k + 1..n {
                    pick[q] = pick[q - 1] + 1;
                }
                break;
            }
        }
    }
}

fn nonneg<Q: ExactField>(n: usize) -> impl Iterator<Item = Halfspace<Q>> {
    (0..n).map(move |j| Halfspace {
        coef: (0..n).map(|q| if q == j { Q::one() } else { Q::zero() }).collect(),
        rhs: Q::zero(),
        upper: false,
    })
}

/// `min a^T x` over `C x >= b`, `x >= 0` by enumerating vertices.
pub fn enumerate_covering<F: Scalar, Q: ExactField>(
    c: &SparseMatrix<F>,
    a: &[F],
    b: &[F],
) -> Result<ExactLpResult<Q>> {
    let n = c.cols();
    let cd: Vec<Vec<Q>> = to_exact(c);
    let bq: Vec<Q> = vec_to_exact(b);
    let aq: Vec<Q> = vec_to_exact(a);
    let hs: Vec<Halfspace<Q>> = cd
        .into_iter()
        .zip(bq)
        .map(|(coef, rhs)| Halfspace { coef, rhs, upper: false })
        .chain(nonneg(n))
        .collect();
    let mut best: Option<(Q, Vec<Q>)> = None;
    vertices(&hs, n, |x| {
        let v = aq.iter().zip(&x).fold(Q::zero(), |s, (p, q)| s + p.clone() * q.clone());
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x));
        }
    })?;
    Ok(match best {
        Some((value, x)) => ExactLpResult::Optimal { value, x },
        None => ExactLpResult::Infeasible,
    })
}

/// Some vertex of `{x >= 0 : P x <= (1 + s) 1, C x >= 1}`, if nonempty.
pub fn enumerate_positive<F: Scalar, Q: ExactField>(
    p: &SparseMatrix<F>,
    c: &SparseMatrix<F>,
    s: Q,
) -> Result<Option<Vec<Q>>> {
    let n = p.cols().max(c.cols());
    let hs: Vec<Halfspace<Q>> = to_exact::<F, Q>(p)
        .into_iter()
        .map(|coef| Halfspace { coef, rhs: Q::one() + s.clone(), upper: true })
        .chain(to_exact::<F, Q>(c).into_iter().map(|coef| Halfspace { coef, rhs: Q::one(), upper: false }))
        .chain(nonneg(n))
        .collect();
    let mut found = None;
    vertices(&hs, n, |x| {
        if found.is_none() {
            found = Some(x);
        }
    })?;
    Ok(found)
}
