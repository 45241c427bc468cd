//! Linear-scan oracles for step sizes and boost lengths.

use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::whack::Side;

/// Smallest `kappa` in `[1, cap]` for which `sum_j v_j z_j / w` reaches `1`,
/// where `z` is `x` after `kappa` explicit whacks; `cap` if none does.
pub fn brute_force_step_size<F: Scalar>(
    row: &[(usize, F)],
    x: &[F],
    w: F,
    lambda: F,
    eps: F,
    cap: u64,
    side: Side,
) -> u64 {
    let mut z: Vec<F> = row.iter().map(|&(j, _)| x[j]).collect();
    for kappa in 1..=cap {
        for (zj, &(_, v)) in z.iter_mut().zip(row) {
            let f = match side {
                Side::Covering => F::one() + eps * v / lambda,
                Side::Packing => F::one() - eps * v / lambda,
            };
            *zj = *zj * f;
        }
        let value = row.iter().zip(&z).fold(F::zero(), |a, (&(_, v), &zj)| a + v * zj) / w;
        if side.reached(value) {
            return kappa;
        }
    }
    cap.max(1)
}

/// Exact boost length `eps / (eta * m)` where `m` is the largest entry of
/// column `k` over all packing rows and over covering rows with
/// `(C x)_j < 2`. `None` when that maximum is zero.
pub fn brute_force_delta<F: Scalar>(
    p: &SparseMatrix<F>,
    c: &SparseMatrix<F>,
    cx: &[F],
    k: usize,
    eps: F,
    eta: F,
) -> Option<F> {
    let mut top = F::zero();
    for i in 0..p.rows() {
        top = top.max(p.get(i, k));
    }
    for (j, &v) in cx.iter().enumerate() {
        if v < F::c(2.0) {
            top = top.max(c.get(j, k));
        }
    }
    (top > F::zero()).then(|| eps / (eta * top))
}
