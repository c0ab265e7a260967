//! Command-line front end. Every command writes CSV (or JSON with
//! `--format json`) preceded by a `# key=value ...` metadata line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::curves::{
    check_feasible, format_grid_step, make_feasible_bounded, make_feasible_unbounded, parse_grid_step,
    PayoffCurve,
};
use crate::dp::{expected_abs_height, minimax_table};
use crate::error::{Error, Result};
use crate::multiscale::{check_pair, ScaleGrid, DEFAULT_BOUND, DEFAULT_STEP};
use crate::sim::{
    self, empirical_payoff_curve, exhaustive_worst_regret, greedy_adversary, random_bits, steady_state_envelope,
};
use crate::specfun::HermiteParams;
use crate::strategies::{Strategy, StrategyKind};
use crate::tradeoff::{boundary_c2_min, one_sided_curve};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hermite-regret", version, about = "Optimal discounted regret strategies for binary prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Payoff curves scaled by 1/sqrt(n): constructed Hermite curves or
    /// simulated envelopes.
    Curve(CurveArgs),
    /// Bets as a function of the scaled height.
    Betting(BettingArgs),
    /// Play one game and emit the per-step trace.
    Simulate(SimulateArgs),
    /// Exact minimax table for the terminal |x| - E|S_T|.
    Dp(DpArgs),
    /// One-sided two-expert regret boundary.
    Tradeoff(TradeoffArgs),
    /// Check a pair of fields against the two-scale inequalities.
    Multiscale(MultiscaleArgs),
    /// Check a curve file for steady-state feasibility (exit 1 if infeasible).
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Window size; rho = 1 - 1/n.
    #[arg(long, default_value_t = 100)]
    n: u32,
    /// Grid spacing 2^-k, as `1/8` or `0.125`.
    #[arg(long, default_value = "1/8")]
    grid_step: String,
    /// hermite:c1=..,c2=.. | wm | curve:<path> | const:+ | const:-.
    /// Default: the optimal Hermite curve and weighted majority.
    #[arg(long)]
    strategy: Option<String>,
    /// Steps per simulated run for envelope strategies.
    #[arg(long, default_value_t = 10_000)]
    horizon: usize,
    /// Random probe runs for envelope strategies.
    #[arg(long, default_value_t = 8)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the steady-state fixed-point envelope instead of simulation.
    #[arg(long)]
    exact: bool,
    /// Build the unbounded-bet Hermite curve.
    #[arg(long)]
    unbounded: bool,
    /// Also write the unscaled Hermite curve in the curve file format.
    #[arg(long)]
    curve_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BettingArgs {
    #[arg(long, default_value_t = 100)]
    n: u32,
    /// Default: the optimal Hermite rule and weighted majority.
    #[arg(long)]
    strategy: Option<String>,
    /// Rows per strategy, evenly spaced over |x_scaled| <= min(3, sqrt n).
    #[arg(long, default_value_t = 121)]
    points: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    n: u32,
    /// Default: the optimal Hermite rule.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, default_value_t = 1000)]
    horizon: usize,
    /// Greedy adversary with this lookahead (1-3) instead of random bits.
    #[arg(long)]
    lookahead: Option<u32>,
    /// Exhaustive worst case over all 2^horizon sequences (horizon <= 22).
    #[arg(long, conflicts_with = "lookahead")]
    exhaustive: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct DpArgs {
    /// Horizon T (1-30).
    #[arg(long, default_value_t = 10)]
    horizon: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TradeoffArgs {
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuiltinPair {
    /// g1 = g2 = 0.
    Zero,
    /// g1 = x1, g2 = 0.
    X1,
}

#[derive(Debug, Args)]
struct MultiscaleArgs {
    /// CSV with columns x1,x2,g1,g2.
    #[arg(long, conflicts_with = "pair")]
    input: Option<PathBuf>,
    /// Built-in pair used when no input file is given.
    #[arg(long, value_enum)]
    pair: Option<BuiltinPair>,
    #[arg(long, default_value_t = 1.0)]
    a1: f64,
    #[arg(long, default_value_t = 2.0)]
    a2: f64,
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    bound: f64,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Curve file (`# n=.. grid_step=.. bounded=..`, then `x,f`).
    path: PathBuf,
    #[arg(long, default_value_t = crate::curves::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{}", if *v == 0.0 { 0.0 } else { *v }),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

struct Table {
    meta: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(command: &str, columns: Vec<&'static str>) -> Self {
        Self {
            meta: vec![
                ("generator".into(), env!("CARGO_PKG_NAME").into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
                ("command".into(), command.into()),
            ],
            columns,
            rows: Vec::new(),
        }
    }

    fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string().replace(' ', "_")));
        self
    }

    fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => {
                let line: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(out, "# {}", line.join(" "))?;
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(ToString::to_string))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let meta: serde_json::Map<String, serde_json::Value> =
                    self.meta.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect();
                let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|row| {
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| Ok(((*c).to_string(), serde_json::to_value(v)?)))
                            .collect::<Result<_>>()
                    })
                    .collect::<Result<_>>()?;
                serde_json::to_writer_pretty(&mut *out, &serde_json::json!({ "meta": meta, "rows": rows }))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

fn open_out<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn default_hermite(n: u32) -> Result<Strategy> {
    Strategy::hermite(HermiteParams::optimal_symmetric(), n)
}

fn strategies_or_default(spec: &Option<String>, n: u32) -> Result<Vec<Strategy>> {
    match spec {
        Some(s) => Ok(vec![Strategy::parse(s, n)?]),
        None => Ok(vec![default_hermite(n)?, Strategy::weighted_majority(n)?]),
    }
}

fn cmd_curve(args: &CurveArgs, stdout: &mut dyn Write) -> Result<i32> {
    let h = parse_grid_step(&args.grid_step)?;
    let strategies = strategies_or_default(&args.strategy, args.n)?;
    let mut table = Table::new("curve", vec!["x_scaled", "f_scaled", "strategy"]);
    table
        .meta("n", args.n)
        .meta("grid_step", format_grid_step(h))
        .meta("seed", args.seed);
    let mut raw_curve = None;
    for s in &strategies {
        let n = s.window().unwrap_or(args.n);
        let scale = f64::from(n).sqrt();
        let rho = 1.0 - 1.0 / f64::from(n);
        let push = |table: &mut Table, x: f64, f: f64| {
            table.rows.push(vec![
                Cell::Num(x / scale),
                Cell::Num(f / scale),
                Cell::Text(s.label().into()),
            ]);
        };
        match &s.kind {
            StrategyKind::Hermite { params, n } => {
                let (curve, note) = if args.unbounded {
                    let built = make_feasible_unbounded(*params, *n, h)?;
                    (built.curve, format!("beta={},shift={}", built.beta, built.shift))
                } else {
                    let built = make_feasible_bounded(*params, *n, h)?;
                    (built.curve, format!("shift={}", built.shift))
                };
                table
                    .meta("hermite", format!("c1={},c2={}", params.c1, params.c2))
                    .meta("hermite_construction", note);
                for (x, f) in curve.nodes() {
                    push(&mut table, x, f);
                }
                raw_curve.get_or_insert(curve);
            }
            StrategyKind::CurveInduced(curve) => {
                for (x, f) in curve.nodes() {
                    push(&mut table, x, f);
                }
                raw_curve.get_or_insert(curve.clone());
            }
            _ if args.exact => {
                let env = steady_state_envelope(s, h, 1e-10, 1_000_000)?;
                table.meta(&format!("{}_instrument", s.label()), "steady-state-fixed-point");
                for (i, &f) in env.values.iter().enumerate() {
                    push(&mut table, env.x_at(i), f);
                }
            }
            _ => {
                let env = empirical_payoff_curve(s, rho, args.horizon, args.probes, args.seed, h)?;
                table
                    .meta(&format!("{}_instrument", s.label()), &env.instrument)
                    .meta("horizon", args.horizon)
                    .meta("probes", args.probes);
                for (x, f) in env.visited() {
                    push(&mut table, x, f);
                }
            }
        }
    }
    if let Some(path) = &args.curve_out {
        let curve = raw_curve.ok_or_else(|| {
            Error::Domain("--curve-out needs a hermite or curve strategy".into())
        })?;
        let meta = vec![format!(
            "generator={} version={}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        )];
        curve.write_csv(BufWriter::new(File::create(path)?), &meta)?;
    }
    table.write(args.common.format, &mut *open_out(&args.common.out, stdout)?)?;
    Ok(EXIT_OK)
}

fn cmd_betting(args: &BettingArgs, stdout: &mut dyn Write) -> Result<i32> {
    if args.points < 2 {
        return Err(Error::Domain("--points must be >= 2".into()));
    }
    let strategies = strategies_or_default(&args.strategy, args.n)?;
    let mut table = Table::new("betting", vec!["x_scaled", "bet", "strategy"]);
    table.meta("n", args.n).meta("points", args.points);
    for s in &strategies {
        let n = f64::from(s.window().unwrap_or(args.n));
        let scale = n.sqrt();
        let reach = 3.0_f64.min(scale);
        for i in 0..args.points {
            let y = -reach + 2.0 * reach * i as f64 / (args.points - 1) as f64;
            let x = (y * scale).clamp(-n, n);
            table.rows.push(vec![Cell::Num(y), Cell::Num(s.bet(x)?), Cell::Text(s.label().into())]);
        }
    }
    table.write(args.common.format, &mut *open_out(&args.common.out, stdout)?)?;
    Ok(EXIT_OK)
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let s = match &args.strategy {
        Some(spec) => Strategy::parse(spec, args.n)?,
        None => default_hermite(args.n)?,
    };
    let rho = 1.0 - 1.0 / f64::from(s.window().unwrap_or(args.n));
    let mut table = Table::new("simulate", vec!["t", "bit", "bet", "h", "a", "a_raw", "regret"]);
    table
        .meta("n", args.n)
        .meta("strategy", &s)
        .meta("horizon", args.horizon);
    let trace = if args.exhaustive {
        let horizon = u32::try_from(args.horizon).map_err(|_| Error::Domain("horizon too large".into()))?;
        let (worst, witness) = exhaustive_worst_regret(&s, rho, horizon)?;
        table.meta("adversary", "exhaustive").meta("worst_final_regret", worst);
        sim::run(&s, &witness, rho)?
    } else if let Some(lookahead) = args.lookahead {
        table.meta("adversary", format!("greedy-lookahead-{lookahead}"));
        greedy_adversary(&s, rho, args.horizon, lookahead)?.1
    } else {
        table.meta("adversary", "random").meta("seed", args.seed);
        let mut trace = sim::run(&s, &random_bits(args.horizon, args.seed), rho)?;
        trace.seed = Some(args.seed);
        trace
    };
    table.meta("max_regret", trace.max_regret());
    for st in &trace.steps {
        table.rows.push(vec![
            Cell::Int(st.t as i64),
            Cell::Int(i64::from(st.bit)),
            Cell::Num(st.bet),
            Cell::Num(st.h),
            Cell::Num(st.a),
            Cell::Num(st.a_raw),
            Cell::Num(st.regret),
        ]);
    }
    table.write(args.common.format, &mut *open_out(&args.common.out, stdout)?)?;
    Ok(EXIT_OK)
}

fn cmd_dp(args: &DpArgs, stdout: &mut dyn Write) -> Result<i32> {
    let e_abs = expected_abs_height(args.horizon)?;
    let dp = minimax_table(args.horizon, |x| BigRational::from_integer(BigInt::from(x.abs())) - &e_abs)?;
    let mut table = Table::new("dp", vec!["t", "x", "s", "bet"]);
    table
        .meta("horizon", args.horizon)
        .meta("terminal", format!("|x|-{e_abs}"))
        .meta("root", dp.root());
    for (t, x, s, bet) in dp.rows() {
        table.rows.push(vec![
            Cell::Int(i64::from(t)),
            Cell::Int(x),
            Cell::Text(s.to_string()),
            Cell::Text(bet.map(ToString::to_string).unwrap_or_default()),
        ]);
    }
    table.write(args.common.format, &mut *open_out(&args.common.out, stdout)?)?;
    Ok(EXIT_OK)
}

fn cmd_tradeoff(args: &TradeoffArgs, stdout: &mut dyn Write) -> Result<i32> {
    let points = one_sided_curve(args.points)?;
    let c2_min = boundary_c2_min()?;
    let mut table = Table::new("tradeoff", vec!["r1", "r2"]);
    table
        .meta("parametrization", "one-sided-boundary")
        .meta("normalization", "sqrt(n)")
        .meta("points", args.points)
        .meta("c2_range", format!("({c2_min},{})", 1.0 - c2_min));
    for p in &points {
        table.rows.push(vec![Cell::Num(p.r1), Cell::Num(p.r2)]);
    }
    table.write(args.common.format, &mut *open_out(&args.common.out, stdout)?)?;
    Ok(EXIT_OK)
}

fn cmd_multiscale(args: &MultiscaleArgs, stdout: &mut dyn Write) -> Result<i32> {
    let grid = match (&args.input, args.pair) {
        (Some(path), _) => ScaleGrid::from_csv(args.a1, args.a2, BufReader::new(File::open(path)?))?,
        (None, pair) => {
            let g1: fn(f64, f64) -> f64 = match pair.unwrap_or(BuiltinPair::Zero) {
                BuiltinPair::Zero => |_, _| 0.0,
                BuiltinPair::X1 => |x1, _| x1,
            };
            ScaleGrid::from_fn(args.a1, args.a2, args.bound, args.step, g1, |_, _| 0.0)?
        }
    };
    let report = check_pair(&grid, args.tolerance);
    let mut table = Table::new("multiscale", vec!["field", "min", "argmin_x1", "argmin_x2"]);
    table
        .meta("a1", grid.a1())
        .meta("a2", grid.a2())
        .meta("bound", grid.bound())
        .meta("step", grid.step())
        .meta("tolerance", args.tolerance)
        .meta("feasible", report.feasible);
    for (name, m) in [("e1", report.e1), ("e2", report.e2), ("slack", report.slack)] {
        table.rows.push(vec![
            Cell::Text(name.into()),
            Cell::Num(m.min),
            Cell::Num(m.argmin[0]),
            Cell::Num(m.argmin[1]),
        ]);
    }
    let mut out = open_out(&args.common.out, stdout)?;
    match args.common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => table.write(Format::Csv, &mut *out)?,
    }
    Ok(if report.feasible { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let curve = PayoffCurve::read_csv(BufReader::new(File::open(&args.path)?))?;
    let report = check_feasible(&curve, args.tolerance);
    let mut out = open_out(&args.common.out, stdout)?;
    match args.common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut table = Table::new(
                "verify",
                vec!["feasible", "min_margin", "argmin_x", "origin_ok", "lipschitz_ok", "max_abs_bet", "points_checked"],
            );
            table
                .meta("path", args.path.display())
                .meta("n", curve.n())
                .meta("grid_step", format_grid_step(curve.grid_step()))
                .meta("bounded", u8::from(curve.bounded_bets()))
                .meta("tolerance", args.tolerance);
            table.rows.push(vec![
                Cell::Text(report.feasible.to_string()),
                Cell::Num(report.min_margin),
                Cell::Num(report.argmin_x),
                Cell::Text(report.origin_ok.to_string()),
                Cell::Text(report.lipschitz_ok.to_string()),
                Cell::Num(report.max_abs_bet),
                Cell::Int(report.points_checked as i64),
            ]);
            table.write(Format::Csv, &mut *out)?;
        }
    }
    Ok(if report.feasible { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn is_broken_pipe(e: &Error) -> bool {
    let kind = match e {
        Error::Io(io) => Some(io.kind()),
        Error::Csv(c) => match c.kind() {
            csv::ErrorKind::Io(io) => Some(io.kind()),
            _ => None,
        },
        Error::Json(j) => j.io_error_kind(),
        _ => None,
    };
    kind == Some(std::io::ErrorKind::BrokenPipe)
}

/// Parses `args` (including the program name) and runs the command, writing
/// to `stdout` unless `--out` is given. Returns the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match &cli.command {
        Command::Curve(a) => cmd_curve(a, stdout),
        Command::Betting(a) => cmd_betting(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Dp(a) => cmd_dp(a, stdout),
        Command::Tradeoff(a) => cmd_tradeoff(a, stdout),
        Command::Multiscale(a) => cmd_multiscale(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Runs with the process arguments and standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["hermite-regret"];
        full.extend_from_slice(args);
        let code = run_with(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(call(&["curve", "--n", "abc"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["betting", "--strategy", "bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("unknown strategy"));
        assert_eq!(call(&["curve", "--grid-step", "0.3"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn betting_rows_are_bounded() {
        let (code, out, _) = call(&["betting", "--n", "100", "--points", "41"]);
        assert_eq!(code, EXIT_OK);
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("# generator=hermite-regret"));
        assert_eq!(lines.next().unwrap(), "x_scaled,bet,strategy");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 82);
        for row in rows {
            let bet: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
            assert!(bet.abs() <= 1.0);
        }
    }

    #[test]
    fn dp_table_root_is_zero() {
        let (code, out, _) = call(&["dp", "--horizon", "4"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("root=0"));
        assert!(out.contains("\n0,0,0,0\n"));
        assert_eq!(out.lines().count(), 2 + 15);
    }

    #[test]
    fn json_format() {
        let (code, out, _) = call(&["tradeoff", "--points", "4", "--format", "json"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
        assert_eq!(v["meta"]["command"], "tradeoff");
        assert!(v["rows"][0]["r1"].is_f64());
    }

    #[test]
    fn multiscale_exit_codes() {
        assert_eq!(call(&["multiscale", "--bound", "1", "--step", "0.05"]).0, EXIT_OK);
        let (code, out, _) = call(&["multiscale", "--pair", "x1", "--bound", "1", "--step", "0.05", "--format", "json"]);
        assert_eq!(code, EXIT_VERIFY_FAILED);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["slack"]["min"].as_f64().unwrap() < -0.99);
    }
}
