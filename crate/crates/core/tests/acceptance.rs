//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;

use mwu_lp::certificate::{check_certificate, Outcome, Slack};
use mwu_lp::cli::gen;
use mwu_lp::exact::{positive_feasible_exact, solve_covering_exact, ExactField, ExactLpResult, Rational};
use mwu_lp::format::SetLine;
use mwu_lp::greedy::{
    eta, extract_packing_dual, relative_cost, soft_potentials, solve_static_positive, GreedyOptions, GreedyState, RelaxingCovering,
    Status,
};
use mwu_lp::instance::{GeneralInstance, NormalizedInstance, PositiveInstance};
use mwu_lp::matrix::SparseMatrix;
use mwu_lp::reductions::solve_general_static;
use mwu_lp::scalar::{ln_weight_cap, phase_cap, round_budget};
use mwu_lp::update::UpdateEvent;
use mwu_lp::whack::{
    solve_basic_with, solve_fast, solve_fast_traced, solve_stream, Choice, DynamicWhackState, MatrixRows, OnlineState, Selector,
    StreamMode, WhackStats,
};

/// Live-word bound `a * size + b` for the streaming state.
const STREAM_WORDS_A: usize = 1;
const STREAM_WORDS_B: usize = 16;

type Criterion = fn() -> Result<String, String>;

/// Collects failures and a few counters for the summary line.
#[derive(Default)]
struct Tally {
    checks: u64,
    failures: Vec<String>,
}

impl Tally {
    fn require(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !cond {
            self.failures.push(msg());
        }
    }

    fn check<E: std::fmt::Display>(&mut self, r: Result<(), E>, ctx: impl FnOnce() -> String) {
        self.checks += 1;
        if let Err(e) = r {
            self.failures.push(format!("{}: {e}", ctx()));
        }
    }

    fn finish(self, detail: String) -> Result<String, String> {
        if self.failures.is_empty() {
            Ok(format!("{detail}, {} checks", self.checks))
        } else {
            let shown: Vec<_> = self.failures.iter().take(3).cloned().collect();
            Err(format!("{} of {} checks failed ({detail}); first: {}", self.failures.len(), self.checks, shown.join(" | ")))
        }
    }
}

fn pick<R: Rng, T: Copy>(rng: &mut R, v: &[T]) -> T {
    v[rng.gen_range(0..v.len())]
}

fn template<R: Rng>(rng: &mut R, max_m: usize, max_n: usize) -> NormalizedInstance<f64> {
    let (m, n) = (rng.gen_range(1..=max_m), rng.gen_range(1..=max_n));
    let lambda = pick(rng, &[1.0, 2.0, 4.0]);
    let density = rng.gen_range(0.2..0.9);
    let eps = pick(rng, &[0.05, 0.1, 0.2]);
    NormalizedInstance::new(gen::random_template(rng, m, n, density, lambda), lambda, eps)
}

fn check_caps(t: &mut Tally, n: usize, eps: f64, stats: &WhackStats, what: &str) {
    let ln_cap = ln_weight_cap(n, eps);
    t.require(stats.max_ln_norm <= ln_cap, || {
        format!("{what}: ln ||x_hat||_1 = {} above ln n^(1/eps) = {ln_cap} (n={n}, eps={eps})", stats.max_ln_norm)
    });
    let pc = phase_cap(n, eps);
    t.require(stats.phases <= pc, || format!("{what}: {} phases above cap {pc} (n={n}, eps={eps})", stats.phases));
}

fn criterion_1() -> Result<String, String> {
    let mut rng = gen::rng(101);
    let mut t = Tally::default();
    let (mut primal, mut dual) = (0, 0);
    for r in 0..500 {
        let inst = template(&mut rng, 50, 50);
        let (o, _) = solve_fast(&inst);
        match o {
            Outcome::CoveringPrimal(_) => primal += 1,
            Outcome::PackingDual(_) => dual += 1,
            _ => {}
        }
        t.require(matches!(o, Outcome::CoveringPrimal(_) | Outcome::PackingDual(_)), || format!("run {r}: outcome {}", o.tag()));
        t.check(check_certificate(Some(&inst.matrix), None, &o, &Slack::covering(inst.eps)), || format!("run {r}"));
    }
    t.finish(format!("500 instances, {primal} primal / {dual} dual"))
}

/// Replays a whack sequence inside the round-by-round template and records
/// any round where the replayed row is not violated.
struct Replay {
    rows: Vec<usize>,
    pos: usize,
    errors: Vec<String>,
}

impl Selector<f64> for Replay {
    fn pick(&mut self, round: u64, cx: &[f64], eps: f64) -> Choice {
        if let Some(&i) = self.rows.get(self.pos) {
            self.pos += 1;
            if cx[i] >= 1.0 || cx[i].is_nan() {
                self.errors.push(format!("round {round}: replayed row {i} has (Cx)_i = {}", cx[i]));
            }
            return Choice::Whack(i);
        }
        if let Some((i, v)) = cx.iter().enumerate().find(|(_, &v)| v < 1.0 - eps) {
            self.errors.push(format!("round {round}: sequence ended but row {i} has (Cx)_i = {v}"));
        }
        Choice::Primal
    }
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0))
}

fn equivalence(t: &mut Tally, inst: &NormalizedInstance<f64>, label: &str) {
    let (fast, stats) = solve_fast_traced(inst, true);
    let trace = stats.trace.clone().unwrap_or_default();
    let rows: Vec<usize> = trace.iter().flat_map(|&(i, d)| std::iter::repeat_n(i, d as usize)).collect();
    let total = round_budget(inst.matrix.cols(), inst.lambda, inst.eps) as usize;
    let whacks = rows.len();
    let mut rep = Replay { rows, pos: 0, errors: Vec::new() };
    let basic = solve_basic_with(inst, &mut rep);
    t.require(rep.errors.is_empty(), || format!("{label}: {}", rep.errors[0]));
    t.require(rep.pos == whacks, || format!("{label}: basic consumed {} of {whacks} whacks", rep.pos));
    t.require(whacks <= total, || format!("{label}: {whacks} whacks above T = {total}"));
    let same = fast.tag() == basic.tag()
        && match (fast.vector(), basic.vector()) {
            (Some(a), Some(b)) => close(a, b),
            (a, b) => a.is_none() && b.is_none(),
        };
    t.require(same, || format!("{label}: fast {:?} vs basic {:?}", fast, basic));
}

fn criterion_2() -> Result<String, String> {
    let mut rng = gen::rng(202);
    let mut t = Tally::default();
    for r in 0..200 {
        let inst = template(&mut rng, 8, 8);
        equivalence(&mut t, &inst, &format!("random {r}"));
    }
    let mut patterns = 0;
    for m in 1..=3 {
        for n in 1..=3 {
            for mask in 0u32..(1 << (m * n)) {
                let d: Vec<Vec<f64>> =
                    (0..m).map(|i| (0..n).map(|j| if mask >> (i * n + j) & 1 == 1 { 1.0 } else { 0.0 }).collect()).collect();
                let inst = NormalizedInstance::new(SparseMatrix::from_dense(&d), 1.0, 0.1);
                equivalence(&mut t, &inst, &format!("pattern {m}x{n} #{mask}"));
                patterns += 1;
            }
        }
    }
    t.finish(format!("200 random + {patterns} 0/lambda patterns"))
}

fn criterion_3() -> Result<String, String> {
    let mut t = Tally::default();
    let mut runs = 0;
    let mut rng = gen::rng(101);
    for r in 0..500 {
        let inst = template(&mut rng, 50, 50);
        let (_, stats) = solve_fast(&inst);
        check_caps(&mut t, inst.matrix.cols(), inst.eps, &stats, &format!("static run {r}"));
        runs += 1;
    }
    let mut rng = gen::rng(303);
    for r in 0..100 {
        let inst = template(&mut rng, 20, 20);
        let (mut s, _) = DynamicWhackState::preprocess(&inst);
        for e in gen::halving_stream(&inst.matrix, 3) {
            let SetLine::C { row, col, value } = e else { unreachable!() };
            let _ = s.handle_update(&UpdateEvent::RestrictCoveringEntry { row, col, value });
        }
        check_caps(&mut t, inst.matrix.cols(), inst.eps, &s.stats().whack, &format!("dynamic run {r}"));
        runs += 1;
    }
    t.finish(format!("{runs} runs"))
}

fn criterion_4() -> Result<String, String> {
    let mut rng = gen::rng(404);
    let mut t = Tally::default();
    let (mut events, mut worst) = (0usize, 0.0f64);
    for r in 0..100 {
        let inst = template(&mut rng, 20, 20);
        let n = inst.matrix.cols();
        let (mut s, _) = DynamicWhackState::preprocess(&inst);
        let slack = Slack::dynamic_covering(inst.eps);
        let rounds = rng.gen_range(1..=8);
        let stream: Vec<_> = gen::halving_stream(&inst.matrix, rounds).into_iter().take(10_000).collect();
        for (k, e) in stream.iter().enumerate() {
            let SetLine::C { row, col, value } = *e else { unreachable!() };
            let o = match s.handle_update(&UpdateEvent::RestrictCoveringEntry { row, col, value }) {
                Ok(o) => o,
                Err(mwu_lp::Error::UpdateAfterTerminal) => s.outcome(),
                Err(e) => {
                    t.require(false, || format!("stream {r} event {k}: {e}"));
                    break;
                }
            };
            t.check(check_certificate(Some(s.matrix()), None, &o, &slack), || format!("stream {r} after event {k}"));
        }
        events += stream.len();
        let tt = round_budget(n, inst.lambda, inst.eps) as f64;
        let budget = 16.0 * ((n.max(2) as f64).ln() / (inst.eps * inst.eps)) * tt.log2();
        for (i, &c) in s.enforce_log().iter().enumerate() {
            worst = worst.max(c as f64 / budget);
            t.require(c as f64 <= budget, || format!("stream {r} row {i}: {c} enforcements above {budget}"));
        }
    }
    t.finish(format!("100 streams, {events} updates, max enforcements/budget = {worst:.3}"))
}

fn criterion_5() -> Result<String, String> {
    let mut rng = gen::rng(505);
    let mut t = Tally::default();
    let mut worst = [0usize; 2];
    for r in 0..100 {
        let inst = template(&mut rng, 30, 30);
        let (m, n) = (inst.matrix.rows(), inst.matrix.cols());
        for (mi, mode) in [StreamMode::FullDual, StreamMode::PrimalOnly].into_iter().enumerate() {
            let (mut o, st) = match solve_stream(MatrixRows(&inst.matrix), inst.lambda, inst.eps, mode) {
                Ok(v) => v,
                Err(e) => {
                    t.require(false, || format!("run {r} {mode:?}: {e}"));
                    continue;
                }
            };
            t.require(st.passes == st.phases, || format!("run {r} {mode:?}: {} passes vs {} phases", st.passes, st.phases));
            let pc = phase_cap(n, inst.eps);
            t.require(st.passes <= pc, || format!("run {r} {mode:?}: {} passes above cap {pc}", st.passes));
            let size = if mode == StreamMode::FullDual { m + n } else { n };
            let bound = STREAM_WORDS_A * size + STREAM_WORDS_B;
            worst[mi] = worst[mi].max(st.max_live_words.saturating_sub(STREAM_WORDS_A * size));
            t.require(st.max_live_words <= bound, || format!("run {r} {mode:?}: {} live words above {bound}", st.max_live_words));
            if let Outcome::PackingDual(y) = &mut o {
                y.resize(m, 0.0);
            }
            if !matches!(o, Outcome::Null) {
                t.check(check_certificate(Some(&inst.matrix), None, &o, &Slack::covering(inst.eps)), || format!("run {r} {mode:?}"));
            }
        }
    }
    t.finish(format!(
        "100 instances x 2 modes, a = {STREAM_WORDS_A}, b = {STREAM_WORDS_B}, largest excess over a*size = {:?}",
        worst
    ))
}

fn criterion_6() -> Result<String, String> {
    let mut rng = gen::rng(606);
    let mut t = Tally::default();
    let mut transitions = 0;
    for r in 0..100 {
        let inst = template(&mut rng, 40, 20);
        let n = inst.matrix.cols();
        let mut s = OnlineState::new(n, inst.lambda, inst.eps);
        for i in 0..inst.matrix.rows() {
            if s.insert_row(inst.matrix.row(i)).is_err() {
                break;
            }
            let (rec, ph) = (s.recourse_total(), s.phase_transitions());
            t.require(rec == n as u64 * ph, || format!("run {r} row {i}: recourse {rec} vs n * transitions = {}", n as u64 * ph));
            let cap = n as u64 * (phase_cap(n, inst.eps) - 1);
            t.require(rec <= cap, || format!("run {r} row {i}: recourse {rec} above {cap}"));
        }
        transitions += s.phase_transitions();
    }
    t.finish(format!("100 runs, {transitions} phase transitions"))
}

fn criterion_7() -> Result<String, String> {
    let mut rng = gen::rng(707);
    let mut t = Tally::default();
    let (eps, c) = (0.05, 4.0);
    let mut worst = 0.0f64;
    for r in 0..200 {
        let (m, n) = (rng.gen_range(1..=10), rng.gen_range(1..=10));
        let density = rng.gen_range(0.2..0.8);
        let cm = gen::random_matrix(&mut rng, m, n, density, 0.5, 2.0, true);
        let a = gen::random_vector(&mut rng, n, 0.5, 2.0);
        let b = gen::random_vector(&mut rng, m, 0.5, 2.0);
        let inst = GeneralInstance { c: cm, a, b, lo: 0.5, hi: 2.0 };
        let sol = match solve_general_static(&inst, eps) {
            Ok(s) => s,
            Err(e) => {
                t.require(false, || format!("instance {r}: {e}"));
                continue;
            }
        };
        let opt = match solve_covering_exact::<f64, Rational>(&inst.c, &inst.a, &inst.b) {
            Ok(ExactLpResult::Optimal { value, .. }) => value.to_float(),
            other => {
                t.require(false, || format!("instance {r}: oracle returned {other:?}"));
                continue;
            }
        };
        let (lo, hi) = (opt * (1.0 - c * eps), opt * (1.0 + c * eps) / (1.0 - c * eps));
        worst = worst.max((sol.objective / opt - 1.0).abs());
        t.require(sol.objective >= lo && sol.objective <= hi, || {
            format!("instance {r}: objective {} outside [{lo}, {hi}] (OPT {opt})", sol.objective)
        });
    }
    t.finish(format!("200 instances, max |objective/OPT - 1| = {worst:.4}"))
}

fn positive_instance<R: Rng>(rng: &mut R, eps: f64) -> PositiveInstance<f64> {
    let (mp, mc, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=4));
    let density = rng.gen_range(0.3..0.9);
    let p = gen::random_matrix(rng, mp, n, density, 0.25, 4.0, false);
    let c = gen::random_matrix(rng, mc, n, density, 0.25, 4.0, true);
    PositiveInstance::with_data_bounds(p, c, eps)
}

fn exact_verdict(p: &SparseMatrix<f64>, c: &SparseMatrix<f64>, s: f64) -> Result<bool, String> {
    positive_feasible_exact::<f64, Rational>(p, c, <Rational as ExactField>::from_float(s)).map(|w| w.is_some()).map_err(|e| e.to_string())
}

fn criterion_8() -> Result<String, String> {
    let mut rng = gen::rng(808);
    let mut t = Tally::default();
    let eps = 1.0 / 200.0;
    let (mut sol, mut inf) = (0, 0);
    for r in 0..300 {
        let inst = positive_instance(&mut rng, eps);
        let (o, _) = solve_static_positive(&inst);
        match &o {
            Outcome::PositiveSolution(_) => {
                sol += 1;
                t.check(check_certificate(Some(&inst.c), Some(&inst.p), &o, &Slack::positive(eps)), || format!("instance {r}"));
            }
            Outcome::Infeasible(_) => {
                inf += 1;
                for s in [0.0, 4.0 * eps] {
                    match exact_verdict(&inst.p, &inst.c, s) {
                        Ok(feasible) => t.require(!feasible, || format!("instance {r}: Infeasible but exact oracle is feasible at slack {s}")),
                        Err(e) => t.require(false, || format!("instance {r}: oracle {e}")),
                    }
                }
            }
            other => t.require(false, || format!("instance {r}: outcome {}", other.tag())),
        }
    }
    t.finish(format!("300 instances, {sol} solutions / {inf} infeasible"))
}

fn positive_event(line: &SetLine<f64>) -> UpdateEvent<f64> {
    match *line {
        SetLine::C { row, col, value } => UpdateEvent::RelaxCoveringEntry { row, col, value },
        SetLine::P { row, col, value } => UpdateEvent::RelaxPackingEntry { row, col, value },
        SetLine::A { index, value } => UpdateEvent::TranslatePacking { row: index, value },
        SetLine::B { index, value } => UpdateEvent::TranslateCovering { row: index, value },
    }
}

fn criterion_9() -> Result<String, String> {
    let mut rng = gen::rng(909);
    let mut t = Tally::default();
    let eps = 1.0 / 200.0;
    let (mut events, mut boosts, mut worst) = (0usize, 0usize, 0.0f64);
    for r in 0..40 {
        let inst = positive_instance(&mut rng, eps);
        let (mp, mc) = (inst.p.rows(), inst.c.rows());
        let budget = 64.0 * ((mp + mc) as f64 + inst.hi / inst.lo).ln().powi(2) / (eps * eps);
        let mut s = GreedyState::with_options(&inst, GreedyOptions { audit: true, log_deltas: true });
        let stream = gen::relaxing_stream(&mut rng, &inst.p, &inst.c, 25, true);
        for e in &stream {
            if let Err(err) = s.handle_event(&positive_event(e)) {
                t.require(false, || format!("run {r}: {err}"));
            }
        }
        events += stream.len();
        t.checks += 1;
        if let Some(f) = s.audit_failures().first() {
            t.failures.push(format!("run {r}: {} audit failures, first {f}", s.audit_failures().len()));
        }
        for (k, &b) in s.stats().boosts.iter().enumerate() {
            worst = worst.max(b as f64 / budget);
            t.require(b as f64 <= budget, || format!("run {r} coordinate {k}: {b} boosts above {budget}"));
        }
        for d in s.delta_log() {
            boosts += 1;
            t.require(d.delta <= d.exact && d.delta >= d.exact / 4.0, || {
                format!("run {r} coordinate {}: heap delta {} outside [{}, {}]", d.coord, d.delta, d.exact / 4.0, d.exact)
            });
        }
    }
    t.finish(format!("40 streams, {events} events, {boosts} boosts checked, max boosts/budget = {worst:.4}"))
}

fn covering_opt(c: &SparseMatrix<f64>) -> Result<f64, String> {
    let (ones_n, ones_m) = (vec![1.0; c.cols()], vec![1.0; c.rows()]);
    match solve_covering_exact::<f64, Rational>(c, &ones_n, &ones_m) {
        Ok(ExactLpResult::Optimal { value, .. }) => Ok(value.to_float()),
        Ok(_) => Ok(f64::INFINITY),
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_10() -> Result<String, String> {
    let mut rng = gen::rng(1010);
    let mut t = Tally::default();
    let eps = 1.0 / 200.0;
    let mut fired = 0;
    for r in 0..60 {
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=4));
        let density = rng.gen_range(0.3..0.9);
        let c0 = gen::random_matrix(&mut rng, m, n, density, 0.1, 1.5, true);
        let mut solver = RelaxingCovering::new(c0.clone(), eps);
        let mut c = c0;
        let stream = gen::relaxing_stream(&mut rng, &SparseMatrix::new(0, n), &c, 6, false);
        for step in 0..=stream.len() {
            if step > 0 {
                let SetLine::C { row, col, value } = stream[step - 1] else { continue };
                c.set(row, col, value);
                if let Err(e) = solver.relax(row, col, value) {
                    t.require(false, || format!("run {r} step {step}: {e}"));
                }
            }
            if solver.state().status() != Status::Infeasible {
                continue;
            }
            let y = match extract_packing_dual(solver.state()) {
                Ok(y) => y,
                Err(e) => {
                    t.require(false, || format!("run {r} step {step}: {e}"));
                    continue;
                }
            };
            fired += 1;
            let o = Outcome::PackingDual(y);
            t.check(check_certificate(Some(&c), None, &o, &Slack::extracted_dual(eps)), || format!("run {r} step {step}"));
            match covering_opt(&c) {
                Ok(opt) => {
                    let bound = 1.0 / (1.0 + 5.0 * eps);
                    t.require(opt >= bound, || format!("run {r} step {step}: exact OPT {opt} below {bound}"));
                }
                Err(e) => t.require(false, || format!("run {r} step {step}: oracle {e}")),
            }
        }
    }
    t.finish(format!("{fired} extractions"))
}

fn criterion_11() -> Result<String, String> {
    let mut rng = gen::rng(1111);
    let mut t = Tally::default();
    let h = 1e-6;
    let mut worst = 0.0f64;
    for r in 0..100 {
        let (mp, mc, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=5));
        let p = gen::random_matrix(&mut rng, mp, n, 0.6, 0.25, 4.0, false);
        let c = gen::random_matrix(&mut rng, mc, n, 0.6, 0.25, 4.0, true);
        let e = pick(&mut rng, &[0.005, 0.05, 0.2]);
        let et = eta(mp, mc, 0.25, 4.0, e);
        // Keep eta * (A x) within a few units so both gradients stay resolvable.
        let spread = rng.gen_range(0.5..8.0);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0) * spread / (et * 4.0 * n as f64)).collect();
        let cands: Vec<usize> = (0..n).filter(|&k| !c.col(k).is_empty()).collect();
        let k = pick(&mut rng, &cands);
        let got = relative_cost(&p, &c, &x, et, k).map_err(|e| e.to_string())?;
        let at = |d: f64| {
            let mut y = x.clone();
            y[k] += d;
            soft_potentials(&p, &c, &y, et)
        };
        let (fp1, fc1) = at(h);
        let (fp0, fc0) = at(-h);
        let (gp, gc) = ((fp1 - fp0) / (2.0 * h), (fc1 - fc0) / (2.0 * h));
        let fd = gp / gc;
        // A column of P with no entries gives an exact zero on both sides.
        let rel = if got == fd { 0.0 } else { (got - fd).abs() / fd.abs() };
        worst = worst.max(rel);
        t.require(rel <= 1e-5, || format!("state {r} k={k} eta={et}: cost {got} vs finite difference {fd} (rel {rel:e})"));
    }
    t.finish(format!("100 states, max relative error {worst:.2e}"))
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("certificate soundness (static covering)", criterion_1),
        ("template equivalence", criterion_2),
        ("weight and phase caps", criterion_3),
        ("dynamic enforcement budget", criterion_4),
        ("streaming passes and space", criterion_5),
        ("online recourse", criterion_6),
        ("general LP optimality gap", criterion_7),
        ("greedy static positive", criterion_8),
        ("greedy dynamic invariants", criterion_9),
        ("dual extraction", criterion_10),
        ("gradient check", criterion_11),
    ];
    let only: Option<usize> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (idx, (name, f)) in criteria.iter().enumerate() {
        let id = idx + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(d) => println!("PASS {id:>2} {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {d} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
