use mwu_lp::instance::NormalizedInstance;
use mwu_lp::matrix::SparseMatrix;
use mwu_lp::scalar::{ln_weight_cap, phase_cap, round_budget};
use mwu_lp::whack::solve_fast;
use mwu_lp::Outcome;

/// One row that never reaches `1 - eps`: every round whacks it, so the norm
/// grows by `1 + eps c / lambda` for all `T` rounds and ends above `n^(1/eps)`.
#[test]
fn weight_cap_counterexample() {
    let (eps, c) = (0.2f64, 0.85f64);
    let inst = NormalizedInstance::new(SparseMatrix::from_dense(&[vec![c, c]]), 1.0, eps);
    let t = round_budget(2, 1.0, eps);
    assert_eq!(t, 18);
    let expected = 2f64.ln() + t as f64 * (1.0 + eps * c).ln();
    let (o, stats) = solve_fast(&inst);
    assert!(matches!(o, Outcome::PackingDual(_)));
    assert!((stats.max_ln_norm - expected).abs() < 1e-9);
    assert!(stats.max_ln_norm > ln_weight_cap(2, eps));
    // The provable cap keeps the initial factor n.
    assert!(stats.max_ln_norm <= ln_weight_cap(2, eps) + 2f64.ln());
    assert!(stats.phases <= phase_cap(2, eps));
}
