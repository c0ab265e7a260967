//! Exact rational minimax for the fixed-horizon game against the better
//! constant expert.

use hermite_regret::dp::{cover_feasibility, expected_abs_height, minimax_table, rational_to_f64};
use hermite_regret::Result;
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> Result<()> {
    println!("{:>3} {:>14} {:>10}", "T", "E|S_T|", "/sqrt(T)");
    for t in [1, 2, 5, 10, 20, 30] {
        let r = expected_abs_height(t)?;
        println!("{t:>3} {:>14} {:>10.6}", r.to_string(), rational_to_f64(&r) / f64::from(t).sqrt());
    }

    let t = 6;
    let r = expected_abs_height(t)?;
    let terminal = |x: i64| BigRational::from_integer(BigInt::from(x.abs())) - &r;
    let table = minimax_table(t, terminal)?;
    println!("\nT = {t}, terminal |x| - {r}: root {} (cover check {:?})", table.root(), cover_feasibility(terminal, t)?);
    println!("{:>2} {:>4} {:>10} {:>10}", "t", "x", "s", "bet");
    for (step, x, s, bet) in table.rows().filter(|row| row.0 <= 3) {
        let bet = bet.map(|b| b.to_string()).unwrap_or_default();
        println!("{step:>2} {x:>4} {:>10} {bet:>10}", s.to_string());
    }
    Ok(())
}
