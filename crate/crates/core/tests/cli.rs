use std::path::Path;
use std::process::{Command, Output};

use hermite_regret::tradeoff::optimal_regret_constant;
use hermite_regret::{HermiteParams, PayoffCurve};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermite-regret"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV with `#` metadata lines and a header.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, body)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

#[test]
fn optimal_curve_minimum_and_regret() {
    let p = HermiteParams::optimal_symmetric();
    let spec = format!("hermite:c1={},c2=0", p.c1);
    let out = bin(&["curve", "--n", "100", "--strategy", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let (header, body) = rows(&stdout(&out));
    assert_eq!(header, ["x_scaled", "f_scaled", "strategy"]);
    let pts: Vec<(f64, f64)> = body.iter().map(|r| (num(&r[0]), num(&r[1]))).collect();
    let min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let regret = pts.iter().map(|(x, f)| x.abs() - f).fold(f64::NEG_INFINITY, f64::max);
    let c = optimal_regret_constant();
    assert!((min + p.c1 / std::f64::consts::PI.sqrt()).abs() < 0.05, "min {min}");
    assert!((regret - c).abs() < 0.05, "regret {regret} vs {c}");
}

#[test]
fn wm_curve_rows_are_finite() {
    let out = bin(&["curve", "--n", "100", "--strategy", "wm", "--horizon", "2000", "--probes", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, body) = rows(&stdout(&out));
    assert!(!body.is_empty());
    for r in &body {
        assert!(num(&r[0]).is_finite() && num(&r[1]).is_finite());
        assert_eq!(r[2], "wm");
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    let args = ["simulate", "--n", "50", "--strategy", "wm", "--horizon", "300", "--seed", "7"];
    assert_eq!(bin(&args).stdout, bin(&args).stdout);
    let other = ["simulate", "--n", "50", "--strategy", "wm", "--horizon", "300", "--seed", "8"];
    assert_ne!(bin(&args).stdout, bin(&other).stdout);
    let curve = ["curve", "--n", "64", "--strategy", "wm", "--horizon", "500", "--probes", "3", "--seed", "3"];
    assert_eq!(bin(&curve).stdout, bin(&curve).stdout);
}

#[test]
fn metadata_records_config() {
    let text = stdout(&bin(&["simulate", "--n", "30", "--horizon", "5", "--seed", "11"]));
    let meta = text.lines().next().unwrap();
    for key in ["generator=hermite-regret", "version=", "command=simulate", "n=30", "seed=11"] {
        assert!(meta.contains(key), "{meta}");
    }
}

#[test]
fn betting_rows_are_bounded() {
    let out = bin(&["betting", "--n", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, body) = rows(&stdout(&out));
    assert_eq!(header, ["x_scaled", "bet", "strategy"]);
    assert!(body.iter().all(|r| num(&r[1]).abs() <= 1.0));
}

#[test]
fn tradeoff_boundary_is_monotone() {
    let out = bin(&["tradeoff", "--points", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, body) = rows(&stdout(&out));
    assert_eq!(body.len(), 50);
    let pts: Vec<(f64, f64)> = body.iter().map(|r| (num(&r[0]), num(&r[1]))).collect();
    for w in pts.windows(2) {
        assert!(w[1].0 > w[0].0 && w[1].1 < w[0].1, "{w:?}");
    }
}

#[test]
fn dp_json_root_is_zero() {
    let out = bin(&["dp", "--horizon", "6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["root"], "0");
    assert_eq!(v["rows"][0]["s"], "0");
}

fn write_curve(path: &Path, f: impl Fn(f64) -> f64) {
    let curve = PayoffCurve::from_fn(16, 0.25, true, |x| Ok(f(x))).unwrap();
    curve.write_csv(std::fs::File::create(path).unwrap(), &[]).unwrap();
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let feasible = dir.path().join("feasible_curve.csv");
    let abs = dir.path().join("abs_curve.csv");
    write_curve(&feasible, |x| x);
    write_curve(&abs, f64::abs);
    assert_eq!(bin(&["verify", feasible.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(bin(&["verify", abs.to_str().unwrap()]).status.code(), Some(1));

    let built = dir.path().join("built.csv");
    let out = bin(&["curve", "--n", "49", "--strategy", "hermite:c1=1,c2=0", "--curve-out", built.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(bin(&["verify", built.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = bin(&["tradeoff", "--points", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let (_, body) = rows(&std::fs::read_to_string(path).unwrap());
    assert_eq!(body.len(), 5);
}

#[test]
fn multiscale_exit_codes() {
    assert_eq!(bin(&["multiscale", "--pair", "zero"]).status.code(), Some(0));
    assert_eq!(bin(&["multiscale", "--pair", "x1"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["curve", "--strategy", "tanh"][..],
        &["curve", "--grid-step", "0.3"],
        &["simulate", "--lookahead", "7"],
        &["frobnicate"],
        &["dp", "--horizon", "abc"],
        &["verify", "/no/such/file.csv"],
    ] {
        let out = bin(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}
