//! Worst payoff a strategy can be driven to at each discounted height, from
//! the steady-state fixed point and from simulation.

use hermite_regret::sim::{empirical_payoff_curve, steady_state_envelope};
use hermite_regret::{HermiteParams, Result, Strategy};

fn main() -> Result<()> {
    let n = 100;
    let rho = 1.0 - 1.0 / f64::from(n);
    let scale = f64::from(n).sqrt();
    for s in [Strategy::hermite(HermiteParams::optimal_symmetric(), n)?, Strategy::weighted_majority(n)?] {
        let exact = steady_state_envelope(&s, 1.0 / 64.0, 1e-10, 1_000_000)?;
        let sampled = empirical_payoff_curve(&s, rho, 20_000, 4, 1, 0.125)?;
        println!(
            "{:<8} fixed point: worst regret {:.4} ({:.4} scaled) at x = {:.2}, {} iterations",
            s.label(),
            exact.worst_regret,
            exact.worst_regret / scale,
            exact.argmax_x,
            exact.iterations
        );
        println!(
            "{:<8} simulation:  worst regret {:.4} over {} visited buckets",
            "",
            sampled.regret(),
            sampled.visited_count()
        );
    }
    Ok(())
}
