use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use oracle_games::game::maximal_matrix;
use oracle_games::nodes::{node_levels, NodeDirection};
use oracle_games::oracle::{normalize as normalize_oracle, shift_to_zero, NORMALIZATION_GRID};
use oracle_games::solver::{sweep as run_sweep, SweepPoint};
use oracle_games::verify::{
    deviation_check, simulate as run_simulation, DeviationCertificate, SimulationResult, DEFAULT_X_GRID,
};
use oracle_games::{
    solve_oracle_game, BimatrixGame, GameAnalysis, MixedStrategy, OracleEquilibrium, OracleFunction, OracleKind,
};
use serde::Serialize;

use crate::error::CliError;
use crate::files::{self, default_x_cap, NormalizeInput};
use crate::format::{csv_field, csv_num, sig, strategy};
use crate::{AnalyzeArgs, NormalizeArgs, SimulateArgs, SolveArgs, SweepArgs};

/// Deviation tolerance used by --verify.
const VERIFY_EPSILON: f64 = 1e-6;
/// Largest accepted distance between simulated and analytic payoffs, in standard errors.
const VERIFY_Z: f64 = 4.0;
const DIGITS: usize = 12;

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<output>"), e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Oracle from `path`, replaced by its normalized form when it is not already normalized.
fn prepared_oracle(path: &Path, game: &BimatrixGame, notes: &mut dyn Write) -> Result<OracleFunction, CliError> {
    let f = files::load_oracle(path)?.resolve(Some(game), path)?;
    if f.check_normalized().is_ok() {
        return Ok(f);
    }
    let report = normalize_oracle(&f)?;
    emit(
        notes,
        "note: the oracle is not continuous, nondecreasing and concave; using its normalized form\n",
    )?;
    Ok(report.concave)
}

fn strategy_label(game: &BimatrixGame, j: usize) -> String {
    game.col_label(j)
}

#[derive(Serialize)]
struct NodeRow {
    i: f64,
    x: Option<f64>,
    strategy: String,
    direction: NodeDirection,
}

#[derive(Serialize)]
struct IntervalRow {
    i_lo: f64,
    i_hi: f64,
    s_b: MixedStrategy,
    b_support: Vec<String>,
    v: f64,
    /// `(a, b, c)` with `s_a(i) = (a + b I) / (c (1 - I))`, per A strategy.
    s_a_coeffs: Option<Vec<[f64; 3]>>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    rows: usize,
    cols: usize,
    strictly_competitive: bool,
    /// A's and B's payoffs when the oracle responds, per column.
    maximal: Vec<[f64; 2]>,
    base_s_a: MixedStrategy,
    base_s_b: MixedStrategy,
    pure_base: bool,
    nodes: Vec<NodeRow>,
    intervals: Vec<IntervalRow>,
    /// Why intervals above some level could not be analysed.
    incomplete: Option<String>,
}

fn node_payment(f: Option<&OracleFunction>, i: f64) -> Option<f64> {
    let f = f?;
    if f.eval(0.0).ok()? > 0.0 || i > f.sup() {
        return None;
    }
    f.level_x(i).ok()
}

pub fn analyze(args: &AnalyzeArgs, out: &mut dyn Write, notes: &mut dyn Write) -> Result<(), CliError> {
    let game = files::load_game(&args.game)?;
    let oracle = match &args.oracle {
        Some(p) => Some(prepared_oracle(p, &game, notes)?),
        None => None,
    };
    let analysis = GameAnalysis::new(&game)?;
    let r = analysis.maximal();
    let base = analysis.base_profile();
    let report = AnalyzeReport {
        rows: game.rows(),
        cols: game.cols(),
        strictly_competitive: game.is_strictly_competitive(),
        maximal: (0..game.cols()).map(|j| [r.a(0, j), r.b(0, j)]).collect(),
        base_s_a: base.s_a.clone(),
        base_s_b: base.s_b.clone(),
        pure_base: analysis.has_pure_base(),
        nodes: analysis
            .nodes()
            .iter()
            .map(|n| NodeRow {
                i: n.i_star,
                x: node_payment(oracle.as_ref(), n.i_star),
                strategy: strategy_label(&game, n.strategy),
                direction: n.direction,
            })
            .collect(),
        intervals: analysis
            .intervals()
            .iter()
            .map(|iv| IntervalRow {
                i_lo: iv.i_lo,
                i_hi: iv.i_hi,
                s_b: iv.s_b.clone(),
                b_support: iv.b_support.iter().map(|&j| strategy_label(&game, j)).collect(),
                v: iv.v,
                s_a_coeffs: iv
                    .s_a_coeffs
                    .as_ref()
                    .map(|cs| cs.iter().map(|c| [c.a, c.b, c.c]).collect()),
            })
            .collect(),
        incomplete: analysis
            .failure()
            .map(|(lo, e)| format!("from I = {}: {e}", sig(lo, DIGITS))),
    };
    if args.json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        return emit(out, &(text + "\n"));
    }
    emit(out, &analyze_text(&game, &report))
}

fn analyze_text(game: &BimatrixGame, rep: &AnalyzeReport) -> String {
    let mut s = String::new();
    let class = if rep.strictly_competitive {
        " (strictly competitive)"
    } else {
        ""
    };
    let _ = writeln!(s, "game: {}x{}{class}", rep.rows, rep.cols);
    let cells: Vec<String> = rep
        .maximal
        .iter()
        .map(|[a, b]| format!("({}, {})", sig(*a, DIGITS), sig(*b, DIGITS)))
        .collect();
    let _ = writeln!(s, "maximal matrix row: {}", cells.join(" "));
    let kind = if rep.pure_base { "pure" } else { "mixed" };
    let _ = writeln!(
        s,
        "base equilibrium ({kind}): s_a = {}, s_b = {}",
        strategy(&rep.base_s_a, DIGITS),
        strategy(&rep.base_s_b, DIGITS)
    );
    if rep.pure_base {
        let _ = writeln!(
            s,
            "a pure base equilibrium makes the oracle worthless; no nodes are tracked"
        );
        return s;
    }
    if rep.nodes.is_empty() {
        let _ = writeln!(s, "nodes: none");
    } else {
        let _ = writeln!(s, "nodes:");
        for n in &rep.nodes {
            let x = n.x.map_or(String::new(), |x| format!("  x = {}", sig(x, DIGITS)));
            let what = match n.direction {
                NodeDirection::BecomesDominated => "becomes dominated",
                NodeDirection::BecomesUndominated => "becomes undominated",
            };
            let _ = writeln!(s, "  I = {}{x}  {} {what}", sig(n.i, DIGITS), n.strategy);
        }
    }
    let _ = writeln!(s, "intervals:");
    for iv in &rep.intervals {
        let _ = writeln!(
            s,
            "  ({}, {})  V = {}  s_b = {}",
            sig(iv.i_lo, DIGITS),
            sig(iv.i_hi, DIGITS),
            sig(iv.v, DIGITS),
            strategy(&iv.s_b, DIGITS)
        );
        match &iv.s_a_coeffs {
            Some(cs) => {
                for (i, [a, b, c]) in cs.iter().enumerate() {
                    if *a == 0.0 && *b == 0.0 {
                        continue;
                    }
                    let sign = if *b < 0.0 { '-' } else { '+' };
                    let _ = writeln!(
                        s,
                        "      {} = ({} {sign} {} I) / ({} (1 - I))",
                        game.row_label(i),
                        sig(*a, DIGITS),
                        sig(b.abs(), DIGITS),
                        sig(*c, DIGITS)
                    );
                }
            }
            None => {
                let _ = writeln!(s, "      s_a not unique on this interval");
            }
        }
    }
    if let Some(why) = &rep.incomplete {
        let _ = writeln!(s, "analysis incomplete {why}");
    }
    s
}

#[derive(Serialize)]
struct SolveReport<'a> {
    equilibrium: &'a OracleEquilibrium,
    certificate: Option<&'a DeviationCertificate>,
    simulation: Option<&'a SimulationResult>,
}

fn z_scores(eq: &OracleEquilibrium, sim: &SimulationResult) -> (f64, f64) {
    let z = |mean: f64, exact: f64, se: f64| {
        let d = (mean - exact).abs();
        if se > 0.0 {
            d / se
        } else if d <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    (
        z(sim.mean_e_a, eq.e_a, sim.std_err_a),
        z(sim.mean_e_b, eq.e_b, sim.std_err_b),
    )
}

fn equilibrium_text(game: &BimatrixGame, eq: &OracleEquilibrium) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "case: {} (region {})", eq.case_label, eq.region);
    let _ = writeln!(s, "x = {}", sig(eq.x, DIGITS));
    if !eq.x_multiplicity.is_degenerate() {
        let _ = writeln!(
            s,
            "  any x in [{}, {}] gives the same equilibrium",
            sig(eq.x_multiplicity.lo, DIGITS),
            sig(eq.x_multiplicity.hi, DIGITS)
        );
    }
    let _ = writeln!(s, "I(x) = {}", sig(eq.i_val, DIGITS));
    let rows: Vec<String> = (0..game.rows()).map(|i| game.row_label(i)).collect();
    let cols: Vec<String> = (0..game.cols()).map(|j| game.col_label(j)).collect();
    let _ = writeln!(s, "s_a [{}] = {}", rows.join(" "), strategy(&eq.s_a, DIGITS));
    let _ = writeln!(s, "s_b [{}] = {}", cols.join(" "), strategy(&eq.s_b, DIGITS));
    let _ = writeln!(s, "E_a = {}", sig(eq.e_a, DIGITS));
    let _ = writeln!(s, "E_b = {}", sig(eq.e_b, DIGITS));
    let _ = writeln!(s, "V = {}", sig(eq.v_at_eq, DIGITS));
    s
}

pub fn solve(args: &SolveArgs, out: &mut dyn Write, notes: &mut dyn Write) -> Result<(), CliError> {
    let game = files::load_game(&args.game)?;
    let f = prepared_oracle(&args.oracle, &game, notes)?;
    let eq = solve_oracle_game(&game, &f)?;
    let mut failure = None;
    let (cert, sim) = if args.verify {
        let r = maximal_matrix(&game)?;
        let cert = deviation_check(&game, &r, &f, &eq, VERIFY_EPSILON, DEFAULT_X_GRID);
        let sim = run_simulation(&game, &f, &eq.s_a, &eq.s_b, eq.x, args.trials, args.seed)?;
        let (za, zb) = z_scores(&eq, &sim);
        if !cert.passed {
            failure = Some(format!("deviation check: {}", cert.worst_deviation));
        } else if za > VERIFY_Z || zb > VERIFY_Z {
            failure = Some(format!(
                "simulated payoffs differ from the analytic ones by {} and {} standard errors",
                sig(za, 4),
                sig(zb, 4)
            ));
        }
        (Some(cert), Some(sim))
    } else {
        (None, None)
    };
    if args.json {
        let rep = SolveReport {
            equilibrium: &eq,
            certificate: cert.as_ref(),
            simulation: sim.as_ref(),
        };
        emit(
            out,
            &(serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"),
        )?;
    } else {
        let mut text = equilibrium_text(&game, &eq);
        if let (Some(cert), Some(sim)) = (&cert, &sim) {
            let _ = writeln!(
                text,
                "deviation check: {} (A strategy gain {}, A payment gain {}, B gain {}, epsilon {})",
                if cert.passed { "passed" } else { "FAILED" },
                sig(cert.max_gain_a_strategy, 4),
                sig(cert.max_gain_a_payment, 4),
                sig(cert.max_gain_b, 4),
                sig(cert.epsilon, 4)
            );
            if !cert.passed {
                let _ = writeln!(text, "  worst deviation: {}", cert.worst_deviation);
            }
            let (za, zb) = z_scores(&eq, sim);
            let _ = writeln!(
                text,
                "simulation: {} trials, seed {}: E_a = {} +- {} (z = {}), E_b = {} +- {} (z = {}), response rate {}",
                sim.trials,
                sim.seed,
                sig(sim.mean_e_a, 8),
                sig(sim.std_err_a, 3),
                sig(za, 3),
                sig(sim.mean_e_b, 8),
                sig(sim.std_err_b, 3),
                sig(zb, 3),
                sig(sim.response_rate, 6)
            );
        }
        emit(out, &text)?;
    }
    match failure {
        Some(why) => Err(CliError::Verification(why)),
        None => Ok(()),
    }
}

/// One character per node level: `<` below it, `=` at it, `>` above it.
fn node_flags(levels: &[f64], i: f64) -> String {
    levels
        .iter()
        .map(|&z| {
            if (i - z).abs() <= 1e-9 {
                '='
            } else if i > z {
                '>'
            } else {
                '<'
            }
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "k,case,x_e,I_xe,E_a,E_b,V,region,node_flags,error";

fn sweep_row(p: &SweepPoint, levels: &[f64], check: Option<&DeviationCertificate>) -> String {
    match &p.result {
        Ok(eq) => {
            let error = match check {
                Some(c) if !c.passed => csv_field(&format!("deviation check failed: {}", c.worst_deviation)),
                _ => String::new(),
            };
            format!(
                "{},{},{},{},{},{},{},{},{},{}",
                csv_num(p.k),
                eq.case_label,
                csv_num(eq.x),
                csv_num(eq.i_val),
                csv_num(eq.e_a),
                csv_num(eq.e_b),
                csv_num(eq.v_at_eq),
                eq.region,
                node_flags(levels, eq.i_val),
                error
            )
        }
        Err(e) => format!("{},,,,,,,,,{}", csv_num(p.k), csv_field(&e.to_string())),
    }
}

pub fn sweep(args: &SweepArgs, out: &mut dyn Write, notes: &mut dyn Write) -> Result<(), CliError> {
    if args.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    if !(args.k_from.is_finite() && args.k_to.is_finite() && args.k_from > 0.0 && args.k_to >= args.k_from) {
        return Err(CliError::Usage("need 0 < --k-from <= --k-to".into()));
    }
    let game = files::load_game(&args.game)?;
    let x_cap = args.x_cap.unwrap_or_else(|| default_x_cap(&game));
    let analysis = GameAnalysis::new(&game)?;
    let levels = node_levels(analysis.nodes());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", args.jobs)))?;
    let points = pool.install(|| run_sweep(&analysis, args.family, x_cap, args.k_from, args.k_to, args.steps));

    let certs: Vec<Option<DeviationCertificate>> = if args.verify {
        let r = analysis.maximal();
        pool.install(|| {
            use rayon::prelude::*;
            points
                .par_iter()
                .map(|p| {
                    let eq = p.result.as_ref().ok()?;
                    let f = args.family.instantiate(p.k, x_cap).ok()?;
                    Some(deviation_check(&game, r, &f, eq, VERIFY_EPSILON, DEFAULT_X_GRID))
                })
                .collect()
        })
    } else {
        vec![None; points.len()]
    };

    let mut csv = String::with_capacity(64 * (points.len() + 1));
    csv.push_str(SWEEP_HEADER);
    csv.push('\n');
    for (p, c) in points.iter().zip(&certs) {
        csv.push_str(&sweep_row(p, &levels, c.as_ref()));
        csv.push('\n');
    }
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => emit(out, &csv)?,
    }

    let errors = points.iter().filter(|p| p.result.is_err()).count();
    if errors > 0 {
        emit(
            notes,
            &format!("note: {errors} of {} rows have solver errors\n", points.len()),
        )?;
    }
    let failed = certs.iter().flatten().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Verification(format!(
            "{failed} rows fail the deviation check"
        )));
    }
    Ok(())
}

pub fn normalize(args: &NormalizeArgs, out: &mut dyn Write, notes: &mut dyn Write) -> Result<(), CliError> {
    let game = match &args.game {
        Some(p) => Some(files::load_game(p)?),
        None => None,
    };
    let original = match files::load_normalize_input(&args.input)? {
        NormalizeInput::Oracle(spec) => spec.resolve(game.as_ref(), &args.input)?,
        NormalizeInput::Samples(samples) => {
            let x_cap = samples.last().map_or(0.0, |p| p.0);
            OracleFunction::piecewise(samples, x_cap).map_err(|e| CliError::parse(&args.input, e.to_string()))?
        }
    };
    let report = normalize_oracle(&original)?;

    if let Some(path) = &args.plot_data {
        let mut csv = String::from("x,I,J1,J\n");
        for (x, i) in original.samples(NORMALIZATION_GRID) {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                csv_num(x),
                csv_num(i),
                csv_num(report.envelope.eval(x)?),
                csv_num(report.concave.eval(x)?)
            );
        }
        write_file(path, &csv)?;
    }

    let mut result = report.concave.clone();
    if report.shifted_game_required {
        match &game {
            Some(g) => {
                let (shifted, j) = shift_to_zero(g, &report.concave)?;
                let text = files::write_game(&shifted);
                match &args.shifted_game {
                    Some(path) => write_file(path, &text)?,
                    None => emit(out, &format!("# shifted game\n{text}\n"))?,
                }
                result = j;
            }
            None => emit(
                notes,
                &format!(
                    "note: I(0) = {} > 0; pass --game to obtain the shifted game with J(0) = 0\n",
                    sig(report.shift_c, DIGITS)
                ),
            )?,
        }
    }
    let text = files::write_oracle(&simplify(result));
    match &args.out {
        Some(path) => write_file(path, &text),
        None => emit(out, &format!("# normalized oracle\n{text}")),
    }
}

/// A piecewise curve with every breakpoint at one level is written as a constant.
fn simplify(f: OracleFunction) -> OracleFunction {
    if let OracleKind::PiecewiseLinear { points } = f.kind() {
        if let Some(&(_, c)) = points.first() {
            if points.iter().all(|p| p.1 == c) {
                return OracleFunction::constant(c, f.x_cap()).unwrap_or(f);
            }
        }
    }
    f
}

fn parse_strategy(text: &str, n: usize, flag: &str) -> Result<MixedStrategy, CliError> {
    let probs = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("{flag}: {e}")))?;
    if probs.len() != n {
        return Err(CliError::Usage(format!(
            "{flag} needs {n} probabilities, got {}",
            probs.len()
        )));
    }
    MixedStrategy::new(probs).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    simulation: &'a SimulationResult,
    /// Analytic payoffs when the profile was solved rather than given.
    equilibrium: Option<&'a OracleEquilibrium>,
}

pub fn simulate(args: &SimulateArgs, out: &mut dyn Write, notes: &mut dyn Write) -> Result<(), CliError> {
    let game = files::load_game(&args.game)?;
    let f = prepared_oracle(&args.oracle, &game, notes)?;
    let (s_a, s_b, x, eq) = match (&args.s_a, &args.s_b, args.x) {
        (Some(a), Some(b), Some(x)) => (
            parse_strategy(a, game.rows(), "--s-a")?,
            parse_strategy(b, game.cols(), "--s-b")?,
            x,
            None,
        ),
        _ => {
            let eq = solve_oracle_game(&game, &f)?;
            (eq.s_a.clone(), eq.s_b.clone(), eq.x, Some(eq))
        }
    };
    let sim = run_simulation(&game, &f, &s_a, &s_b, x, args.trials, args.seed)?;
    if args.json {
        let rep = SimulateReport {
            simulation: &sim,
            equilibrium: eq.as_ref(),
        };
        return emit(
            out,
            &(serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"),
        );
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "profile: s_a = {}, s_b = {}, x = {}",
        strategy(&s_a, DIGITS),
        strategy(&s_b, DIGITS),
        sig(x, DIGITS)
    );
    let _ = writeln!(s, "trials: {}, seed: {}", sim.trials, sim.seed);
    let _ = writeln!(s, "E_a = {} +- {}", sig(sim.mean_e_a, 10), sig(sim.std_err_a, 4));
    let _ = writeln!(s, "E_b = {} +- {}", sig(sim.mean_e_b, 10), sig(sim.std_err_b, 4));
    let _ = writeln!(s, "response rate = {}", sig(sim.response_rate, 10));
    if let Some(eq) = &eq {
        let (za, zb) = z_scores(eq, &sim);
        let _ = writeln!(
            s,
            "analytic: E_a = {} (z = {}), E_b = {} (z = {})",
            sig(eq.e_a, DIGITS),
            sig(za, 3),
            sig(eq.e_b, DIGITS),
            sig(zb, 3)
        );
    }
    emit(out, &s)
}
