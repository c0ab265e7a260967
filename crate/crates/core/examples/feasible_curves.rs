//! Builds steady-state feasible payoff curves and certifies them with the
//! breakpoint scan, then replays every length-16 sequence against one of them.

use hermite_regret::curves::{
    check_feasible, loss_of, make_feasible_bounded, make_feasible_unbounded, regret_of, DEFAULT_GRID_STEP,
};
use hermite_regret::sim::exhaustive_guarantee;
use hermite_regret::{HermiteParams, Result, Strategy};

fn main() -> Result<()> {
    let p = HermiteParams::optimal_symmetric();
    println!("{:>5} {:>10} {:>12} {:>10} {:>10}", "n", "shift", "min margin", "R/sqrt(n)", "L/sqrt(n)");
    for n in [25, 100, 400] {
        let built = make_feasible_bounded(p, n, DEFAULT_GRID_STEP)?;
        let report = check_feasible(&built.curve, 0.0);
        let scale = f64::from(n).sqrt();
        println!(
            "{n:>5} {:>10.5} {:>12.3e} {:>10.5} {:>10.5}",
            built.shift,
            report.min_margin,
            regret_of(&built.curve) / scale,
            loss_of(&built.curve) / scale
        );
    }

    let damped = make_feasible_unbounded(HermiteParams::new(1.0, 0.0)?, 100, DEFAULT_GRID_STEP)?;
    println!(
        "\nunbounded bets, n = 100: beta = {}, shift = {:.5}, half width {}",
        damped.beta,
        damped.shift,
        damped.curve.half_width()
    );

    let curve = make_feasible_bounded(p, 25, DEFAULT_GRID_STEP)?.curve;
    let strategy = Strategy::curve_induced(curve.clone());
    let check = exhaustive_guarantee(&strategy, |h| curve.value_at(h), curve.rho(), 16)?;
    println!(
        "\nall {} sequences of length 16 at n = 25: min (a_t - f(h_t)) = {:.4}",
        check.sequences, check.min_slack
    );
    Ok(())
}
