//! Discounted fixed-time game: the payoff needed at the root equals the
//! discounted expectation of the terminal, and the discounted height has
//! variance alpha.

use hermite_regret::dp::{alpha, discounted_heights, discounted_minimax};
use hermite_regret::Result;

fn main() -> Result<()> {
    for (t, rho) in [(10, 0.9), (16, 0.95), (20, 0.9)] {
        let heights = discounted_heights(t, rho)?;
        let count = heights.len() as f64;
        let mean_abs = heights.iter().map(|h| h.abs()).sum::<f64>() / count;
        let value = discounted_minimax(t, rho, |h| h.abs() - mean_abs)?;
        let var = heights.iter().map(|h| h * h).sum::<f64>() / count;
        println!(
            "T = {t:>2}, rho = {rho}: root {:+.2e}, max |bet| {:.4}, std {:.5}, sqrt(alpha) {:.5}",
            value.root_value,
            value.max_abs_bet,
            var.sqrt(),
            alpha(rho, t)?.sqrt()
        );
    }
    Ok(())
}
