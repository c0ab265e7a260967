//! Evaluates erfi, the Hermite payoff family and its slope-capped version.

use hermite_regret::specfun::{capped_hermite, erfi_inverse, hermite_payoff, CappedHermite};
use hermite_regret::{erfi, HermiteParams, Result};

fn main() -> Result<()> {
    for x in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let y = erfi(x)?;
        println!("erfi({x}) = {y:.12}  inverse -> {:.12}", erfi_inverse(y)?);
    }

    let p = HermiteParams::optimal_symmetric();
    let capped = CappedHermite::new(p)?;
    println!("\noptimal parameters c1 = {:.10}, c2 = {}", p.c1, p.c2);
    if let Some(cap) = capped.cap_points() {
        println!("slope reaches -1 at {:.6} and +1 at {:.6}", cap.lower, cap.upper);
    }
    println!("{:>6} {:>12} {:>12} {:>8}", "x", "F", "Fhat", "slope");
    for i in -6..=6 {
        let x = 0.5 * f64::from(i);
        let (f, slope) = capped_hermite(p, x)?;
        println!("{x:>6.2} {:>12.6} {f:>12.6} {slope:>8.4}", hermite_payoff(p, x)?);
    }
    Ok(())
}
