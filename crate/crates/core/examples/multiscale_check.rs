//! Grid check of candidate payoff pairs for two discount scales.

use hermite_regret::multiscale::{check_pair, residual_at, ScaleGrid};
use hermite_regret::Result;

type Field = fn(f64, f64) -> f64;

fn main() -> Result<()> {
    let (a1, a2) = (1.0, 2.0);
    let candidates: [(&str, Field, Field); 3] = [
        ("zero", |_, _| 0.0, |_, _| 0.0),
        ("g1 = x1", |x1, _| x1, |_, _| 0.0),
        ("g = 0.1 (x1 + x2)", |x1, x2| 0.1 * (x1 + x2), |x1, x2| 0.1 * (x1 + x2)),
    ];
    for (name, g1, g2) in candidates {
        let grid = ScaleGrid::from_fn(a1, a2, 3.0, 0.02, g1, g2)?;
        let report = check_pair(&grid, 1e-9);
        let origin = residual_at(&grid, 0.0, 0.0)?;
        println!(
            "{name:<18} feasible {:<5}  min E1 {:+.4}  min E2 {:+.4}  min slack {:+.4} at {:?}  origin {origin:?}",
            report.feasible, report.e1.min, report.e2.min, report.slack.min, report.slack.argmin
        );
    }
    Ok(())
}
