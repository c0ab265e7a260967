//! Regret trade-offs: the symmetric regret/loss curve and the one-sided
//! boundary between the regrets to two experts.

use hermite_regret::tradeoff::{
    experts_reductions, one_sided_curve, one_sided_feasible, symmetric_tradeoff, TradeoffPoint,
};
use hermite_regret::Result;

fn main() -> Result<()> {
    println!("symmetric curve (per sqrt(n))");
    for l in [0.3, 0.4, 0.5, 0.6, 0.8] {
        let r = symmetric_tradeoff(l)?;
        let experts = experts_reductions(TradeoffPoint::TwoSided { r, l })?;
        println!("  L = {l:.2}  R = {r:.5}  as experts: {experts:?}");
    }

    println!("\none-sided boundary");
    for p in one_sided_curve(8)? {
        let check = one_sided_feasible(p.r1, p.r2)?;
        let inside = one_sided_feasible(p.r1 - 0.02, p.r2)?.feasible;
        println!(
            "  c2 = {:.4}  R1 = {:.5}  R2 = {:.5}  margin {:+.1e}  feasible after shrinking R1: {inside}",
            p.c2, p.r1, p.r2, check.margin
        );
    }
    Ok(())
}
