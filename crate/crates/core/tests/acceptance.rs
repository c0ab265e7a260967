use std::process::ExitCode;
use std::time::{Duration, Instant};

use hermite_regret::curves::{self, make_feasible_bounded, recursion_residual, regret_of, PayoffCurve};
use hermite_regret::dp::{self, binomials, cover_feasibility, expectation, expected_abs_height, minimax_table};
use hermite_regret::multiscale::{check_pair, residual_fields, ScaleGrid};
use hermite_regret::sim::{exhaustive_guarantee, greedy_adversary, steady_state_envelope};
use hermite_regret::specfun::{gaussian_weighted_payoff, hermite_payoff, HermiteParams};
use hermite_regret::tradeoff::{one_sided_curve, one_sided_feasible, optimal_regret_constant, symmetric_tradeoff, t_func};
use hermite_regret::{erfi, Strategy};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    let mut s = f(a) + f(b);
    for i in 1..steps {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn erfi_quadrature(x: f64) -> f64 {
    2.0 / std::f64::consts::PI.sqrt() * simpson(|t| (t * t).exp(), 0.0, x, 20_000)
}

fn fixed_horizon_regret() -> Outcome {
    for t in 1..=20u32 {
        let mean = lib(expected_abs_height(t))?;
        let table = lib(minimax_table(t, |x| int(x.abs()) - &mean))?;
        ensure(table.root().is_zero(), || format!("T={t}: root {}", table.root()))?;
        let bet = table.max_abs_bet();
        ensure(bet <= int(1), || format!("T={t}: max |bet| {bet}"))?;
    }
    let ratio = dp::rational_to_f64(&lib(expected_abs_height(20))?) / 20f64.sqrt();
    ensure((0.75..=0.85).contains(&ratio), || format!("E|S_20|/sqrt(20) = {ratio}"))?;
    Ok(format!("roots exact for T=1..20, E|S_20|/sqrt(20) = {ratio:.6}"))
}

fn cover_equivalence() -> Outcome {
    const T: u32 = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let choose = binomials(T);
    let denom = BigInt::from(1u64 << T);
    for trial in 0..100 {
        let mut raw = vec![int(0)];
        for _ in 0..T {
            let step = BigRational::new(BigInt::from(rng.gen_range(-14..=14)), BigInt::from(7));
            let next = raw.last().unwrap() + step;
            raw.push(next);
        }
        let index = |x: i64| ((x + T as i64) / 2) as usize;
        let mean = lib(expectation(T, |x| raw[index(x)].clone()))?;
        let centred: Vec<BigRational> = raw.iter().map(|v| v - &mean).collect();
        let terminal = |x: i64| centred[index(x)].clone();
        let check = lib(cover_feasibility(terminal, T))?;
        ensure(check.feasible(), || format!("trial {trial}: cover check {check:?}"))?;
        let root = lib(minimax_table(T, terminal))?.root().clone();
        ensure(root.is_zero(), || format!("trial {trial}: root {root}"))?;

        let k = rng.gen_range(0..=T as usize);
        let bumped = |x: i64| {
            let v = terminal(x);
            if index(x) == T as usize - k {
                v + int(1)
            } else {
                v
            }
        };
        let root = lib(minimax_table(T, bumped))?.root().clone();
        let want = BigRational::new(choose[k].clone(), denom.clone());
        ensure(root == want, || format!("trial {trial}: perturbed root {root}, want {want}"))?;
        ensure(!lib(cover_feasibility(bumped, T))?.sum_zero, || format!("trial {trial}: bump kept sum zero"))?;
    }
    Ok("100 centred terminals give root 0; +1 at height T-2k gives C(T,k)/2^T".into())
}

fn hermite_machinery() -> Outcome {
    let h = 2e-3;
    let mut worst: f64 = 0.0;
    for &c1 in &[0.5, 1.0, 3.0] {
        for &c2 in &[-1.0, 0.0, 2.0] {
            let p = lib(HermiteParams::new(c1, c2))?;
            let g = lib(curves::sample_symmetric(2.1, h, |x| hermite_payoff(p, x)))?;
            for i in -1000..=1000 {
                let x = i as f64 * h;
                let r = lib(curves::differential_residual_extrapolated(&g, h, x))?;
                worst = worst.max(r.abs());
            }
        }
    }
    ensure(worst < 1e-6, || format!("ODE residual {worst:.3e}"))?;

    let mut orth_worst: f64 = 0.0;
    for &(c1, c2) in &[(1.0, 0.0), (0.697, 0.3), (2.5, -1.0)] {
        let p = lib(HermiteParams::new(c1, c2))?;
        let integrand = |t: f64| {
            let x = t / (1.0 - t * t);
            let jac = (1.0 + t * t) / ((1.0 - t * t) * (1.0 - t * t));
            gaussian_weighted_payoff(p, x).unwrap() * jac
        };
        let eps = 1e-7;
        let whole = simpson(integrand, -1.0 + eps, 1.0 - eps, 400_000);
        orth_worst = orth_worst.max(whole.abs());
    }
    ensure(orth_worst < 1e-6, || format!("orthogonality integral {orth_worst:.3e}"))?;

    let e1 = lib(erfi(1.0))?;
    let q = erfi_quadrature(1.0);
    ensure((e1 - q).abs() < 1e-10, || format!("erfi(1) = {e1}, quadrature {q}"))?;
    Ok(format!(
        "ODE residual {worst:.2e}, orthogonality {orth_worst:.2e}, erfi(1) = {e1:.12}"
    ))
}

fn steady_state_feasibility() -> Outcome {
    let p = lib(HermiteParams::new(1.0, 0.0))?;
    let mut shifts = Vec::new();
    for &n in &[25u32, 100, 400] {
        let built = lib(make_feasible_bounded(p, n, curves::DEFAULT_GRID_STEP))?;
        ensure(built.shift <= 2.0, || format!("n={n}: shift {}", built.shift))?;
        shifts.push(built.shift);
    }
    ensure(shifts[2] <= shifts[1] + 0.5, || format!("K(400) = {} vs K(100) = {}", shifts[2], shifts[1]))?;

    let curve = lib(make_feasible_bounded(p, 25, curves::DEFAULT_GRID_STEP))?.curve;
    let rho = curve.rho();
    let strategy = Strategy::curve_induced(curve.clone());
    let check = lib(exhaustive_guarantee(&strategy, |h| curve.value_at(h), rho, 16))?;
    ensure(check.sequences == 65_536, || format!("{} sequences", check.sequences))?;
    ensure(check.holds(1e-9), || format!("slack {} on {:?}", check.min_slack, check.witness))?;
    Ok(format!(
        "K = {:?}, exhaustive min slack {:.3e} over {} states",
        shifts, check.min_slack, check.states_checked
    ))
}

fn optimal_constant() -> Outcome {
    let f10 = |x: f64| x * erfi_quadrature(x) - (x * x).exp() / std::f64::consts::PI.sqrt();
    let (mut lo, mut hi) = (0.5, 1.5);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f10(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    let oracle = 0.5 * (lo + hi);
    let c = optimal_regret_constant();
    ensure((c - oracle).abs() < 1e-8, || format!("C = {c}, stationary point {oracle}"))?;

    let n = 400u32;
    let curve = lib(make_feasible_bounded(HermiteParams::optimal_symmetric(), n, curves::DEFAULT_GRID_STEP))?.curve;
    let scaled = regret_of(&curve) / f64::from(n).sqrt();
    let allowed = 0.05 + 1.0 / f64::from(n).sqrt();
    ensure((scaled - c).abs() <= allowed, || format!("scaled regret {scaled} vs C {c}"))?;
    Ok(format!("C = {c:.10}, scaled regret at n=400 = {scaled:.6}"))
}

fn improvement_claim() -> Outcome {
    let n = 100u32;
    let rho = 1.0 - 1.0 / f64::from(n);
    let hermite = lib(Strategy::hermite(HermiteParams::optimal_symmetric(), n))?;
    let wm = lib(Strategy::weighted_majority(n))?;
    let (rh, _) = lib(greedy_adversary(&hermite, rho, 100_000, 2))?;
    let (rw, _) = lib(greedy_adversary(&wm, rho, 100_000, 2))?;
    let eh = lib(steady_state_envelope(&hermite, 1.0 / 64.0, 1e-10, 1_000_000))?.worst_regret;
    let ew = lib(steady_state_envelope(&wm, 1.0 / 64.0, 1e-10, 1_000_000))?.worst_regret;
    let detail = format!(
        "greedy max regret hermite {rh:.4}, wm {rw:.4} (ratio {:.4}); exact envelope hermite {eh:.4}, wm {ew:.4} (ratio {:.4})",
        rh / rw,
        eh / ew
    );
    ensure(rh <= 0.95 * rw, || detail.clone())?;
    Ok(detail)
}

fn tradeoff_consistency() -> Outcome {
    let points = lib(one_sided_curve(50))?;
    ensure(points.len() == 50, || format!("{} points", points.len()))?;
    let mut worst: f64 = 0.0;
    for p in &points {
        let on = lib(one_sided_feasible(p.r1, p.r2))?;
        ensure(on.margin.abs() <= 1e-6, || format!("c2={}: margin {}", p.c2, on.margin))?;
        worst = worst.max(on.margin.abs());
        for (r1, r2) in [(p.r1 - 0.02, p.r2), (p.r1, p.r2 - 0.02)] {
            let shrunk = lib(one_sided_feasible(r1, r2))?;
            ensure(!shrunk.feasible, || format!("c2={}: ({r1}, {r2}) still feasible", p.c2))?;
        }
    }
    let mut trip: f64 = 0.0;
    for i in 0..10 {
        let l = 0.3 + 0.3 * i as f64;
        let r = lib(symmetric_tradeoff(l))?;
        let v = lib(t_func(r / l))? * std::f64::consts::PI.sqrt() * l;
        trip = trip.max((v - 1.0).abs());
    }
    ensure(trip <= 1e-9, || format!("round-trip error {trip:.3e}"))?;
    Ok(format!("boundary margin <= {worst:.2e}, round-trip error {trip:.2e}"))
}

fn discounted_fixed_time() -> Outcome {
    let (t, rho) = (10u32, 0.9);
    let heights = lib(dp::discounted_heights(t, rho))?;
    let mean = heights.iter().map(|h| h.abs()).sum::<f64>() / heights.len() as f64;
    let value = lib(dp::discounted_minimax(t, rho, |h| h.abs() - mean))?;
    ensure(value.root_value.abs() <= 1e-12, || format!("root {:.3e}", value.root_value))?;

    let rho = 1.0 - 1.0 / 10.0;
    let heights = lib(dp::discounted_heights(20, rho))?;
    let m = heights.iter().sum::<f64>() / heights.len() as f64;
    let var = heights.iter().map(|h| (h - m) * (h - m)).sum::<f64>() / (heights.len() - 1) as f64;
    let want = lib(dp::alpha(rho, 20))?.sqrt();
    let rel = (var.sqrt() - want).abs() / want;
    ensure(rel <= 0.05, || format!("std {} vs sqrt(alpha) {want}", var.sqrt()))?;
    Ok(format!("root {:.2e}, std/sqrt(alpha) - 1 = {rel:.2e}", value.root_value))
}

fn equality_rigidity() -> Outcome {
    let n = 100u32;
    let h = 0.125;
    let mut worst: f64 = 0.0;
    for &slope in &[-1.0, -0.4, 0.0, 0.25, 1.0] {
        let curve = lib(PayoffCurve::from_fn(n, h, true, |x| Ok(slope * x)))?;
        for i in 0..1000 {
            let x = curve.x_at(i * (curve.len() - 1) / 999);
            worst = worst.max(lib(recursion_residual(&curve, x))?.abs());
        }
    }
    ensure(worst <= 1e-12, || format!("linear residual {worst:.3e}"))?;

    let scale = f64::from(n).sqrt();
    let p = HermiteParams::optimal_symmetric();
    let hermite = lib(PayoffCurve::from_fn_with_half_width(n, h, 2.0 * scale, false, |x| {
        Ok(scale * hermite_payoff(p, x / scale)?)
    }))?;
    let mut best = f64::NEG_INFINITY;
    for i in 0..hermite.len() {
        let x = hermite.x_at(i);
        if x.abs() <= 2.0 * scale - 2.0 {
            best = best.max(lib(recursion_residual(&hermite, x))?);
        }
    }
    ensure(best > 0.0, || format!("max residual of the Hermite curve {best:.3e}"))?;
    Ok(format!("linear residual {worst:.2e}, Hermite max residual {best:.3e}"))
}

fn multiscale_checker() -> Outcome {
    for &(a1, a2) in &[(1.0, 2.0), (0.5, 3.0), (2.0, 1.0)] {
        let grid = lib(ScaleGrid::from_fn(a1, a2, 3.0, 0.02, |_, _| 0.0, |_, _| 0.0))?;
        let fields = residual_fields(&grid);
        let worst = fields.e1.iter().chain(&fields.e2).chain(&fields.slack).fold(0.0f64, |m, v| m.max(v.abs()));
        ensure(worst < 1e-9, || format!("zero pair ({a1}, {a2}): residual {worst}"))?;
        ensure(check_pair(&grid, 1e-9).feasible, || format!("zero pair ({a1}, {a2}) rejected"))?;
    }
    let grid = lib(ScaleGrid::from_fn(1.0, 2.0, 3.0, 0.02, |x1, _| x1, |_, _| 0.0))?;
    let report = check_pair(&grid, 1e-9);
    ensure(!report.feasible && report.slack.min < 0.0, || format!("violating pair accepted: {report:?}"))?;
    ensure(report.e1.min >= -1e-9 && report.e2.min >= -1e-9, || "violation not through slack".into())?;
    Ok(format!("zero pairs pass; g1 = x1 rejected with slack {:.4}", report.slack.min))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("fixed-horizon optimal regret", Duration::from_secs(1), fixed_horizon_regret),
        ("cover characterization", Duration::from_secs(5), cover_equivalence),
        ("hermite machinery", Duration::from_secs(60), hermite_machinery),
        ("steady-state feasibility", Duration::from_secs(30), steady_state_feasibility),
        ("optimal constant", Duration::from_secs(10), optimal_constant),
        ("improvement over weighted majority", Duration::from_secs(120), improvement_claim),
        ("trade-off consistency", Duration::from_secs(5), tradeoff_consistency),
        ("discounted fixed time", Duration::from_secs(10), discounted_fixed_time),
        ("equality rigidity", Duration::from_secs(60), equality_rigidity),
        ("multi-scale checker", Duration::from_secs(5), multiscale_checker),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > *limit => Err(format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{elapsed:.2?}]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
