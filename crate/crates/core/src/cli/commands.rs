//! Command implementations.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::json;

use crate::certificate::{check_certificate, Outcome, Slack};
use crate::error::{Error, Result};
use crate::exact::{positive_feasible_exact, solve_covering_exact, solve_packing_exact, ExactField, ExactLpResult, Rational, MAX_DIM};
use crate::format::{emit_instance, emit_updates, parse_instance, parse_updates, FileRows, InstanceFile, SetLine};
use crate::greedy::GreedyState;
use crate::instance::{GeneralInstance, NormalizedInstance, PositiveInstance, POSITIVE_EPS_MAX};
use crate::matrix::SparseMatrix;
use crate::reductions::{solve_general_static, solve_general_stream, GeneralDynamic, GeneralOnline, GeneralSolution, GuessScheduling};
use crate::scalar::CHECK_TOL;
use crate::update::UpdateEvent;
use crate::whack::{solve_basic, solve_fast, solve_packing_fast, solve_stream, DynamicWhackState, InsertResult, MatrixRows, OnlineState, StreamMode};

use super::gen;
use super::report::{digest, Report, VerifyResult};
use super::{CliError, Command, Common, GenArgs, GenKind, Scheduling, Setting, SolveMode, StreamArg, StreamKind, EXIT_OK, EXIT_VIOLATION};

const DEFAULT_EPS: f64 = 0.1;

/// Optimality band constant for the general LP check.
const GAP_CONSTANT: f64 = 4.0;

type CliResult<T> = std::result::Result<T, CliError>;

pub(super) fn execute(cmd: &Command) -> CliResult<i32> {
    let (report, common) = match cmd {
        Command::Solve { instance, mode, common } => (solve(instance, *mode, common)?, common),
        Command::Packing { instance, common } => (packing(instance, common)?, common),
        Command::Positive { instance, updates, common } => (positive(instance, updates.as_deref(), common)?, common),
        Command::Dynamic { instance, updates, common } => (dynamic(instance, updates, common)?, common),
        Command::Stream { instance, mode, common } => (stream(instance, *mode, common)?, common),
        Command::Online { instance, common } => (online(instance, common)?, common),
        Command::General { instance, setting, updates, mode, scheduling, common } => {
            (general(instance, *setting, updates.as_deref(), *mode, *scheduling, common)?, common)
        }
        Command::Gen(args) => {
            generate(args)?;
            return Ok(EXIT_OK);
        }
    };
    emit(&report, common)?;
    Ok(match &report.verify_result {
        Some(v) if !v.ok => EXIT_VIOLATION,
        _ => EXIT_OK,
    })
}

fn emit(report: &Report, common: &Common) -> CliResult<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    match &common.report {
        Some(p) => fs::write(p, text + "\n").map_err(Error::from)?,
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(Error::from(e).into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<InstanceFile<f64>> {
    parse_instance(&read(path)?)
}

fn first_error(r: std::result::Result<(), Vec<Error>>) -> Result<()> {
    r.map_err(|mut v| v.swap_remove(0))
}

fn wrong_kind(what: &'static str) -> Error {
    Error::Parse { line: 1, msg: format!("expected a `{what}` instance") }
}

fn stats_json<T: serde::Serialize>(s: &T) -> serde_json::Value {
    serde_json::to_value(s).unwrap_or(serde_json::Value::Null)
}

fn small(m: usize, n: usize) -> bool {
    m <= MAX_DIM && n <= MAX_DIM
}

fn transpose(p: &SparseMatrix<f64>) -> SparseMatrix<f64> {
    let t: Vec<_> = p.triplets().map(|(i, j, v)| (j, i, v)).collect();
    SparseMatrix::from_triplets(p.cols(), p.rows(), &t).expect("indices in range")
}

fn exact_value(r: &ExactLpResult<Rational>) -> f64 {
    match r {
        ExactLpResult::Optimal { value, .. } => value.to_float(),
        ExactLpResult::Infeasible | ExactLpResult::Unbounded => f64::INFINITY,
    }
}

fn covering(path: &Path, common: &Common) -> Result<NormalizedInstance<f64>> {
    let InstanceFile::Covering { c, lambda } = load(path)? else { return Err(wrong_kind("covering")) };
    let inst = NormalizedInstance::new(c, lambda, common.eps.unwrap_or(DEFAULT_EPS));
    first_error(inst.validate())?;
    Ok(inst)
}

/// Certificate check plus the exact bound the certificate implies on
/// `OPT = min 1^T x` subject to `C x >= 1`.
fn verify_covering(c: &SparseMatrix<f64>, o: &Outcome<f64>, slack: &Slack) -> VerifyResult {
    let mut v = VerifyResult::default();
    if matches!(o, Outcome::Null) {
        return v.finish();
    }
    v.check("certificate", check_certificate(Some(c), None, o, slack));
    if small(c.rows(), c.cols()) {
        let ones_n = vec![1.0; c.cols()];
        let ones_m = vec![1.0; c.rows()];
        match solve_covering_exact::<f64, Rational>(c, &ones_n, &ones_m) {
            Ok(r) => {
                let opt = exact_value(&r);
                v.exact_opt = Some(opt);
                match o {
                    Outcome::CoveringPrimal(x) => {
                        let bound = x.iter().sum::<f64>() / slack.cover_floor;
                        v.require(opt <= bound * (1.0 + CHECK_TOL), || format!("exact OPT {opt} above primal bound {bound}"));
                    }
                    Outcome::PackingDual(y) => {
                        let bound = y.iter().sum::<f64>() / slack.dual_ceiling;
                        v.require(opt >= bound * (1.0 - CHECK_TOL), || format!("exact OPT {opt} below dual bound {bound}"));
                    }
                    _ => {}
                }
            }
            Err(e) => v.failures.push(format!("oracle: {e}")),
        }
    }
    v.finish()
}

fn solve(path: &Path, mode: SolveMode, common: &Common) -> CliResult<Report> {
    let inst = covering(path, common)?;
    let (o, stats) = match mode {
        SolveMode::Fast => {
            let (o, s) = solve_fast(&inst);
            (o, stats_json(&s))
        }
        SolveMode::Basic => (solve_basic(&inst), json!({})),
    };
    let mut r = Report::new("solve", &o, stats);
    if common.verify {
        r.verify_result = Some(verify_covering(&inst.matrix, &o, &Slack::covering(inst.eps)));
    }
    Ok(r)
}

fn packing(path: &Path, common: &Common) -> CliResult<Report> {
    let InstanceFile::Packing { p, lambda } = load(path)? else { return Err(wrong_kind("packing").into()) };
    let inst = NormalizedInstance::new(p, lambda, common.eps.unwrap_or(DEFAULT_EPS));
    first_error(inst.validate())?;
    let (o, stats) = solve_packing_fast(&inst);
    let mut r = Report::new("packing", &o, stats_json(&stats));
    if common.verify {
        let p = &inst.matrix;
        let slack = Slack::packing(inst.eps);
        let mut v = VerifyResult::default();
        v.check("certificate", check_certificate(None, Some(p), &o, &slack));
        if small(p.rows(), p.cols()) {
            // max 1^T x subject to P x <= 1, as a packing LP over the rows of P^T.
            match solve_packing_exact::<f64, Rational>(&transpose(p), &vec![1.0; p.rows()], &vec![1.0; p.cols()]) {
                Ok(res) => {
                    let opt = exact_value(&res);
                    v.exact_opt = Some(opt);
                    match &o {
                        Outcome::PackingPrimal(x) => {
                            let bound = x.iter().sum::<f64>() / slack.pack_ceiling;
                            v.require(opt >= bound * (1.0 - CHECK_TOL), || format!("exact OPT {opt} below primal bound {bound}"));
                        }
                        Outcome::CoveringDual(y) => {
                            let bound = y.iter().sum::<f64>() / slack.dual_floor;
                            v.require(opt <= bound * (1.0 + CHECK_TOL), || format!("exact OPT {opt} above dual bound {bound}"));
                        }
                        _ => {}
                    }
                }
                Err(e) => v.failures.push(format!("oracle: {e}")),
            }
        }
        r.verify_result = Some(v.finish());
    }
    Ok(r)
}

fn divide_rows(m: &SparseMatrix<f64>, rhs: &[f64]) -> SparseMatrix<f64> {
    m.map_values(|i, _, v| v / rhs[i])
}

fn positive_event(line: &SetLine<f64>) -> UpdateEvent<f64> {
    match *line {
        SetLine::C { row, col, value } => UpdateEvent::RelaxCoveringEntry { row, col, value },
        SetLine::P { row, col, value } => UpdateEvent::RelaxPackingEntry { row, col, value },
        SetLine::A { index, value } => UpdateEvent::TranslatePacking { row: index, value },
        SetLine::B { index, value } => UpdateEvent::TranslateCovering { row: index, value },
    }
}

fn positive(path: &Path, updates: Option<&Path>, common: &Common) -> CliResult<Report> {
    let InstanceFile::Positive { p, c } = load(path)? else { return Err(wrong_kind("positive").into()) };
    let inst = PositiveInstance::with_data_bounds(p, c, common.eps.unwrap_or(POSITIVE_EPS_MAX));
    first_error(inst.validate())?;
    let events = match updates {
        Some(u) => parse_updates::<f64>(&read(u)?)?,
        None => Vec::new(),
    };
    let mut state = GreedyState::new(&inst);
    for e in &events {
        state.handle_event(&positive_event(e))?;
    }
    let o = state.outcome();
    let stats = state.stats();
    let mut r = Report::new(
        "positive",
        &o,
        json!({
            "boosts": stats.boosts.iter().sum::<u64>(),
            "phases": stats.phases,
            "heap_readjusts": stats.heap_readjusts,
            "outcome": o.tag(),
            "detail": stats_json(&stats),
        }),
    );
    if common.verify {
        let mut v = VerifyResult::default();
        match &o {
            Outcome::PositiveSolution(_) => {
                let p = divide_rows(state.raw_p(), state.packing_rhs());
                let c = divide_rows(state.raw_c(), state.covering_rhs());
                v.check("certificate", check_certificate(Some(&c), Some(&p), &o, &Slack::positive(inst.eps)));
            }
            _ => {
                let (pa, ca) = state.applied_rhs();
                let (p, c) = (divide_rows(state.raw_p(), pa), divide_rows(state.raw_c(), ca));
                if small(p.rows() + c.rows(), p.cols()) {
                    match positive_feasible_exact::<f64, Rational>(&p, &c, <Rational as ExactField>::from_float(0.0)) {
                        Ok(w) => {
                            v.exact_feasible = Some(w.is_some());
                            v.require(w.is_none(), || "infeasible verdict but the exact oracle found a solution".into());
                        }
                        Err(e) => v.failures.push(format!("oracle: {e}")),
                    }
                }
            }
        }
        r.verify_result = Some(v.finish());
    }
    Ok(r)
}

fn dynamic(path: &Path, updates: &Path, common: &Common) -> CliResult<Report> {
    let inst = covering(path, common)?;
    let events = parse_updates::<f64>(&read(updates)?)?;
    let (mut state, mut o) = DynamicWhackState::preprocess(&inst);
    let slack = Slack::dynamic_covering(inst.eps);
    let mut v = VerifyResult::default();
    let mut frozen = 0u64;
    for (k, e) in events.iter().enumerate() {
        let SetLine::C { row, col, value } = *e else {
            return Err(Error::Parse { line: k + 1, msg: "dynamic covering accepts only `set C` lines".into() }.into());
        };
        match state.handle_update(&UpdateEvent::RestrictCoveringEntry { row, col, value }) {
            Ok(out) => o = out,
            Err(Error::UpdateAfterTerminal) => frozen += 1,
            Err(e) => return Err(e.into()),
        }
        if common.verify {
            v.check(&format!("after update {}", k + 1), check_certificate(Some(state.matrix()), None, &o, &slack));
        }
    }
    let mut stats = stats_json(&state.stats());
    stats["updates_after_terminal"] = json!(frozen);
    let mut r = Report::new("dynamic", &o, stats);
    if common.verify {
        let fin = verify_covering(state.matrix(), &o, &slack);
        v.failures.extend(fin.failures);
        v.exact_opt = fin.exact_opt;
        r.verify_result = Some(v.finish());
    }
    Ok(r)
}

fn stream_mode(m: StreamArg) -> StreamMode {
    match m {
        StreamArg::FullDual => StreamMode::FullDual,
        StreamArg::PrimalOnly => StreamMode::PrimalOnly,
    }
}

fn stream(path: &Path, mode: StreamArg, common: &Common) -> CliResult<Report> {
    let rows = FileRows::open(path)?;
    let eps = common.eps.unwrap_or(DEFAULT_EPS);
    let lambda = rows.lambda();
    first_error(NormalizedInstance::new(SparseMatrix::new(1, 1), lambda, eps).validate())?;
    let (mut o, stats) = solve_stream(rows, lambda, eps, stream_mode(mode))?;
    let inst = if common.verify { Some(covering(path, common)?) } else { None };
    if let (Outcome::PackingDual(y), Some(inst)) = (&mut o, &inst) {
        y.resize(inst.matrix.rows(), 0.0);
    }
    let mut r = Report::new("stream", &o, stats_json(&stats));
    if let Some(inst) = inst {
        r.verify_result = Some(verify_covering(&inst.matrix, &o, &Slack::covering(eps)));
    }
    Ok(r)
}

fn online(path: &Path, common: &Common) -> CliResult<Report> {
    let inst = covering(path, common)?;
    let mut state = OnlineState::new(inst.matrix.cols(), inst.lambda, inst.eps);
    let mut seen = 0usize;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for i in 0..inst.matrix.rows() {
        let res = state.insert_row(inst.matrix.row(i))?;
        seen += 1;
        let (tag, vec) = match &res {
            InsertResult::Maintained(x) => ("maintained", x),
            InsertResult::Terminated(y) => ("terminated", y),
        };
        // A closed stdout only loses the progress lines.
        let _ = writeln!(out, "row {i} {tag} {} recourse {}", digest(vec), state.recourse_total());
        if matches!(res, InsertResult::Terminated(_)) {
            break;
        }
    }
    let o = state.outcome();
    let stats = json!({
        "rows_inserted": seen,
        "rows_ignored": inst.matrix.rows() - seen,
        "recourse": state.recourse_total(),
        "phase_transitions": state.phase_transitions(),
    });
    let mut r = Report::new("online", &o, stats);
    if common.verify {
        let slack = if o.is_primal() { Slack::online_covering(inst.eps) } else { Slack::covering(inst.eps) };
        r.verify_result = Some(verify_covering(state.inner().matrix(), &o, &slack));
    }
    Ok(r)
}

/// Checks `C x >= floor b`, `C^T y <= a` and the objective against the exact optimum.
fn verify_general(inst: &GeneralInstance<f64>, sol: &GeneralSolution<f64>, floor: f64, eps: f64) -> VerifyResult {
    let mut v = VerifyResult::default();
    let cx = inst.c.mul(&sol.x);
    for (i, (&got, &b)) in cx.iter().zip(&inst.b).enumerate() {
        v.require(got >= floor * b * (1.0 - CHECK_TOL), || format!("row {i}: C x = {got} below {floor} * b = {}", floor * b));
    }
    if let Some(y) = &sol.y {
        let cty = inst.c.tmul(y);
        for (j, (&got, &a)) in cty.iter().zip(&inst.a).enumerate() {
            v.require(got <= a * (1.0 + CHECK_TOL), || format!("column {j}: C^T y = {got} above a = {a}"));
        }
    }
    if small(inst.c.rows(), inst.c.cols()) {
        match solve_covering_exact::<f64, Rational>(&inst.c, &inst.a, &inst.b) {
            Ok(res) => {
                let opt = exact_value(&res);
                v.exact_opt = Some(opt);
                let obj = sol.objective;
                v.opt_gap = Some(obj / opt - 1.0);
                let ce = GAP_CONSTANT * eps;
                let (lo, hi) = (opt * (1.0 - ce), opt * (1.0 + ce) / (1.0 - ce));
                v.require(obj >= lo * (1.0 - CHECK_TOL) && obj <= hi * (1.0 + CHECK_TOL), || {
                    format!("objective {obj} outside [{lo}, {hi}] around exact OPT {opt}")
                });
            }
            Err(e) => v.failures.push(format!("oracle: {e}")),
        }
    }
    v.finish()
}

fn general_event(line: &SetLine<f64>, k: usize) -> Result<UpdateEvent<f64>> {
    Ok(match *line {
        SetLine::C { row, col, value } => UpdateEvent::RestrictCoveringEntry { row, col, value },
        SetLine::A { index, value } => UpdateEvent::TranslateObjective { col: index, value },
        SetLine::B { index, value } => UpdateEvent::TranslateCovering { row: index, value },
        SetLine::P { .. } => return Err(Error::Parse { line: k + 1, msg: "general LPs have no packing matrix".into() }),
    })
}

fn general(
    path: &Path,
    setting: Setting,
    updates: Option<&Path>,
    mode: StreamArg,
    scheduling: Scheduling,
    common: &Common,
) -> CliResult<Report> {
    let InstanceFile::General { c, a, b } = load(path)? else { return Err(wrong_kind("general").into()) };
    if updates.is_some() && setting != Setting::Dynamic {
        return Err(Error::InvalidValue { what: "--updates outside --setting dynamic", value: f64::NAN }.into());
    }
    let events = match updates {
        Some(u) => parse_updates::<f64>(&read(u)?)?,
        None => Vec::new(),
    };
    let mut inst = GeneralInstance::with_data_bounds(c, a, b);
    // The data bounds must hold over the whole update sequence.
    for e in &events {
        let (SetLine::C { value, .. } | SetLine::P { value, .. } | SetLine::A { value, .. } | SetLine::B { value, .. }) = *e;
        if value > 0.0 {
            inst.lo = inst.lo.min(value);
            inst.hi = inst.hi.max(value);
        }
    }
    first_error(inst.validate())?;
    let eps = common.eps.unwrap_or(DEFAULT_EPS);
    first_error(NormalizedInstance::new(SparseMatrix::new(1, 1), 1.0, eps).validate())?;
    let (sol, stats, checked, floor) = match setting {
        Setting::Static => {
            let sol = solve_general_static(&inst, eps)?;
            (sol, json!({}), inst.clone(), 1.0 - eps)
        }
        Setting::Dynamic => {
            let mut d = GeneralDynamic::new(&inst, eps)?;
            for (k, e) in events.iter().enumerate() {
                d.update(&general_event(e, k)?)?;
            }
            let now = GeneralInstance { c: d.matrix().clone(), a: d.a().to_vec(), b: d.b().to_vec(), ..inst.clone() };
            // Filtered right-hand-side growth can leave up to a 1 + eps gap.
            (d.solution()?, stats_json(d.counters()), now, (1.0 - eps) / (1.0 + eps))
        }
        Setting::Stream => {
            let sched = match scheduling {
                Scheduling::Sequential => GuessScheduling::Sequential,
                Scheduling::Interleaved => GuessScheduling::Interleaved,
            };
            let mut src = MatrixRows(&inst.c);
            let (sol, rep) = solve_general_stream(&mut src, &inst.a, &inst.b, inst.lo, inst.hi, eps, stream_mode(mode), sched)?;
            (sol, stats_json(&rep), inst.clone(), 1.0 - eps)
        }
        Setting::Online => {
            let mut g = GeneralOnline::new(inst.a.clone(), inst.lo, inst.hi, eps)?;
            for i in 0..inst.c.rows() {
                g.insert_row(inst.c.row(i), inst.b[i])?;
            }
            (g.solution()?, stats_json(&g.report()), inst.clone(), 1.0 - eps)
        }
    };
    let mut stats = stats;
    stats["objective"] = json!(sol.objective);
    stats["dual_objective"] = json!(sol.dual_objective);
    stats["guess"] = json!(sol.guess);
    stats["guess_index"] = json!(sol.guess_index);
    stats["guesses_solved"] = json!(sol.guesses_solved);
    let mut r = Report::tagged("general", "CoveringPrimal", Some(&sol.x), stats);
    if common.verify {
        r.verify_result = Some(verify_general(&checked, &sol, floor, eps));
    }
    Ok(r)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn generate(g: &GenArgs) -> CliResult<()> {
    let mut rng = gen::rng(g.seed);
    let bad = |what| CliError::Input(Error::InvalidValue { what, value: f64::NAN });
    if !(g.lo > 0.0) || g.lo > g.hi || !(0.0..=1.0).contains(&g.density) {
        return Err(bad("--lo, --hi or --density"));
    }
    let (inst, stream) = match g.kind {
        GenKind::Covering | GenKind::Packing => {
            let m = gen::random_template(&mut rng, g.rows, g.cols, g.density, g.hi);
            let s = match g.stream {
                Some(StreamKind::Restricting) if g.kind == GenKind::Covering => {
                    Some(gen::restricting_stream(&mut rng, &m, g.events, 0.0, true))
                }
                Some(_) => return Err(bad("stream kind for this instance kind")),
                None => None,
            };
            let inst = if g.kind == GenKind::Covering {
                InstanceFile::Covering { c: m, lambda: g.hi }
            } else {
                InstanceFile::Packing { p: m, lambda: g.hi }
            };
            (inst, s)
        }
        GenKind::Positive => {
            let p = gen::random_matrix(&mut rng, g.packing_rows, g.cols, g.density, g.lo, g.hi, false);
            let c = gen::random_matrix(&mut rng, g.rows, g.cols, g.density, g.lo, g.hi, true);
            let s = match g.stream {
                Some(StreamKind::Relaxing) => Some(gen::relaxing_stream(&mut rng, &p, &c, g.events, true)),
                Some(_) => return Err(bad("stream kind for this instance kind")),
                None => None,
            };
            (InstanceFile::Positive { p, c }, s)
        }
        GenKind::General => {
            let c = gen::random_matrix(&mut rng, g.rows, g.cols, g.density, g.lo, g.hi, true);
            let a = gen::random_vector(&mut rng, g.cols, g.lo, g.hi);
            let b = gen::random_vector(&mut rng, g.rows, g.lo, g.hi);
            let s = match g.stream {
                Some(StreamKind::Restricting) => Some(gen::general_restricting_stream(&mut rng, &c, &a, &b, g.events, g.lo, g.hi)),
                Some(_) => return Err(bad("stream kind for this instance kind")),
                None => None,
            };
            (InstanceFile::General { c, a, b }, s)
        }
    };
    write_out(g.out.as_deref(), &emit_instance(&inst))?;
    if let Some(s) = stream {
        let path = g.updates.as_deref().ok_or_else(|| bad("--updates path for the stream"))?;
        fs::write(path, emit_updates(&s)).map_err(Error::from)?;
    }
    Ok(())
}
