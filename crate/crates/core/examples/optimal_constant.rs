//! The optimal regret constant and how constructed curves approach it as the
//! window grows.

use hermite_regret::curves::{make_feasible_bounded, regret_of, DEFAULT_GRID_STEP};
use hermite_regret::tradeoff::{optimal_alpha, optimal_regret_constant};
use hermite_regret::{HermiteParams, Result};

fn main() -> Result<()> {
    let c = optimal_regret_constant();
    let (alpha, value) = optimal_alpha();
    println!("C = {c:.10} (alpha* = {alpha:.8}, objective {value:.10})");
    let p = HermiteParams::optimal_symmetric();
    for n in [25, 100, 400, 1600] {
        let built = make_feasible_bounded(p, n, DEFAULT_GRID_STEP)?;
        let scaled = regret_of(&built.curve) / f64::from(n).sqrt();
        println!("n = {n:>5}: regret / sqrt(n) = {scaled:.6}, gap {:+.6}", scaled - c);
    }
    Ok(())
}
