//! Greedy lookahead adversaries and exhaustive search against the optimal
//! Hermite strategy and weighted majority.

use hermite_regret::sim::{exhaustive_worst_regret, greedy_adversary};
use hermite_regret::{HermiteParams, Result, Strategy};

fn main() -> Result<()> {
    let n = 100;
    let rho = 1.0 - 1.0 / f64::from(n);
    let strategies = [
        Strategy::hermite(HermiteParams::optimal_symmetric(), n)?,
        Strategy::weighted_majority(n)?,
    ];
    println!("n = {n}, horizon 20000");
    for s in &strategies {
        for lookahead in 1..=3 {
            let (worst, trace) = greedy_adversary(s, rho, 20_000, lookahead)?;
            let ups = trace.bits().iter().filter(|b| **b > 0).count();
            println!("  {:<8} lookahead {lookahead}: max regret {worst:.4}, {ups} up-bits", s.label());
        }
    }

    let n = 25;
    let rho = 1.0 - 1.0 / f64::from(n);
    println!("\nn = {n}, all sequences of length 18");
    for s in [Strategy::hermite(HermiteParams::optimal_symmetric(), n)?, Strategy::weighted_majority(n)?] {
        let (worst, bits) = exhaustive_worst_regret(&s, rho, 18)?;
        let shown: String = bits.iter().map(|b| if *b > 0 { '+' } else { '-' }).collect();
        println!("  {:<8} worst final regret {:.4} / sqrt(n) = {:.4} on {shown}", s.label(), worst, worst / 5.0);
    }
    Ok(())
}
