use mwu_lp::cli::gen;
use mwu_lp::exact::{solve_covering_exact, ExactField, ExactLpResult, Rational};
use mwu_lp::format::SetLine;
use mwu_lp::instance::GeneralInstance;
use mwu_lp::reductions::{solve_general_static, solve_general_stream, GeneralDynamic, GeneralOnline, GeneralSolution, GuessScheduling};
use mwu_lp::update::UpdateEvent;
use mwu_lp::whack::{MatrixRows, StreamMode};
use proptest::prelude::*;

const EPS: f64 = 0.05;
const C: f64 = 4.0;

fn instance(seed: u64, m: usize, n: usize) -> GeneralInstance<f64> {
    let mut r = gen::rng(seed);
    let c = gen::random_matrix(&mut r, m, n, 0.5, 0.5, 2.0, true);
    let a = gen::random_vector(&mut r, n, 0.5, 2.0);
    let b = gen::random_vector(&mut r, m, 0.5, 2.0);
    GeneralInstance { c, a, b, lo: 0.5, hi: 2.0 }
}

fn opt(inst: &GeneralInstance<f64>) -> f64 {
    match solve_covering_exact::<f64, Rational>(&inst.c, &inst.a, &inst.b).unwrap() {
        ExactLpResult::Optimal { value, .. } => value.to_float(),
        other => panic!("{other:?}"),
    }
}

fn in_band(sol: &GeneralSolution<f64>, inst: &GeneralInstance<f64>, floor: f64) -> Result<(), TestCaseError> {
    let o = opt(inst);
    prop_assert!(sol.objective >= o * (1.0 - C * EPS) && sol.objective <= o * (1.0 + C * EPS) / (1.0 - C * EPS), "{} vs {o}", sol.objective);
    for (got, b) in inst.c.mul(&sol.x).iter().zip(&inst.b) {
        prop_assert!(*got >= floor * b - 1e-9);
    }
    if let Some(y) = &sol.y {
        prop_assert_eq!(y.len(), inst.b.len());
        for (got, a) in inst.c.tmul(y).iter().zip(&inst.a) {
            prop_assert!(*got <= a * (1.0 + 1e-9));
        }
        // Weak duality against the exact optimum.
        prop_assert!(sol.dual_objective.unwrap() <= o * (1.0 + 1e-9));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_setting_lands_in_the_band(seed in any::<u64>(), m in 1usize..6, n in 1usize..6) {
        let inst = instance(seed, m, n);
        in_band(&solve_general_static(&inst, EPS).unwrap(), &inst, 1.0 - EPS)?;
        in_band(&GeneralDynamic::new(&inst, EPS).unwrap().solution().unwrap(), &inst, 1.0 - EPS)?;
        for sched in [GuessScheduling::Sequential, GuessScheduling::Interleaved] {
            let (sol, _) = solve_general_stream(&mut MatrixRows(&inst.c), &inst.a, &inst.b, 0.5, 2.0, EPS, StreamMode::FullDual, sched).unwrap();
            in_band(&sol, &inst, 1.0 - EPS)?;
        }
        let mut on = GeneralOnline::new(inst.a.clone(), 0.5, 2.0, EPS).unwrap();
        for i in 0..m {
            on.insert_row(inst.c.row(i), inst.b[i]).unwrap();
        }
        in_band(&on.solution().unwrap(), &inst, 1.0 - EPS)?;
    }

    #[test]
    fn dynamic_follows_restricting_stream(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let inst = instance(seed, m, n);
        let mut d = GeneralDynamic::new(&inst, EPS).unwrap();
        let stream = gen::general_restricting_stream(&mut gen::rng(seed ^ 7), &inst.c, &inst.a, &inst.b, 12, 0.5, 2.0);
        for e in &stream {
            let ev = match *e {
                SetLine::C { row, col, value } => UpdateEvent::RestrictCoveringEntry { row, col, value },
                SetLine::A { index, value } => UpdateEvent::TranslateObjective { col: index, value },
                SetLine::B { index, value } => UpdateEvent::TranslateCovering { row: index, value },
                SetLine::P { .. } => unreachable!(),
            };
            d.update(&ev).unwrap();
            let now = GeneralInstance { c: d.matrix().clone(), a: d.a().to_vec(), b: d.b().to_vec(), ..inst.clone() };
            let sol = d.solution().unwrap();
            let o = opt(&now);
            // Filtered translations cost up to one more 1 + eps factor on each side.
            let slack = (1.0 + EPS) * (1.0 + EPS);
            prop_assert!(sol.objective >= o * (1.0 - C * EPS) / slack && sol.objective <= o * slack * (1.0 + C * EPS) / (1.0 - C * EPS),
                "{} vs {o}", sol.objective);
            for (got, b) in now.c.mul(&sol.x).iter().zip(&now.b) {
                prop_assert!(*got >= (1.0 - EPS) / (1.0 + EPS) * b - 1e-9);
            }
        }
    }
}
