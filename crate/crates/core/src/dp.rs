//! Fixed-horizon minimax dynamic programming.
//!
//! The undiscounted recursion runs in exact rational arithmetic over heights
//! `{-t, -t+2, ..., t}`. The discounted variant walks the full history tree
//! since discounted heights do not merge.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};

pub const MAX_TABLE_HORIZON: u32 = 30;
pub const MAX_BINOMIAL_HORIZON: u32 = 60;
pub const MAX_TREE_HORIZON: u32 = 22;

/// Backward-induction table. Row `t` holds heights `-t, -t+2, ..., t`.
#[derive(Debug, Clone)]
pub struct DPTable {
    horizon: u32,
    values: Vec<Vec<BigRational>>,
    bets: Vec<Vec<BigRational>>,
}

fn index(t: u32, x: i64) -> Option<usize> {
    let t = i64::from(t);
    if x.abs() > t || (x + t) % 2 != 0 {
        return None;
    }
    Some(((x + t) / 2) as usize)
}

impl DPTable {
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Minimal payoff `s_t(x)` needed at time `t` and height `x`.
    pub fn value(&self, t: u32, x: i64) -> Option<&BigRational> {
        self.values.get(t as usize)?.get(index(t, x)?)
    }

    /// Optimal bet at time `t < T` and height `x`.
    pub fn bet(&self, t: u32, x: i64) -> Option<&BigRational> {
        self.bets.get(t as usize)?.get(index(t, x)?)
    }

    /// `s_0(0)`.
    pub fn root(&self) -> &BigRational {
        &self.values[0][0]
    }

    /// Iterates `(t, x, s_t(x), bet)`; the bet is `None` on the terminal row.
    pub fn rows(&self) -> impl Iterator<Item = (u32, i64, &BigRational, Option<&BigRational>)> + '_ {
        self.values.iter().enumerate().flat_map(move |(t, row)| {
            row.iter().enumerate().map(move |(j, s)| {
                let x = 2 * j as i64 - t as i64;
                (t as u32, x, s, self.bets.get(t).map(|b| &b[j]))
            })
        })
    }

    /// `max |bet|` over the whole table.
    pub fn max_abs_bet(&self) -> BigRational {
        self.bets
            .iter()
            .flatten()
            .map(|b| b.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// CSV `t,x,s,bet` with exact rationals (`p/q`); the terminal row has an
    /// empty bet.
    pub fn write_csv<W: Write>(&self, mut out: W, meta: &[String]) -> Result<()> {
        for line in meta {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "s", "bet"])?;
        for (t, x, s, bet) in self.rows() {
            w.write_record([
                t.to_string(),
                x.to_string(),
                s.to_string(),
                bet.map(ToString::to_string).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `s_t(x) = (s_{t+1}(x+1) + s_{t+1}(x-1)) / 2` with bets
/// `(s_{t+1}(x+1) - s_{t+1}(x-1)) / 2` back from `s_T = terminal`.
pub fn minimax_table(horizon: u32, terminal: impl Fn(i64) -> BigRational) -> Result<DPTable> {
    if horizon == 0 || horizon > MAX_TABLE_HORIZON {
        return domain(format!("horizon must be in 1..={MAX_TABLE_HORIZON}, got {horizon}"));
    }
    let t_max = i64::from(horizon);
    let last: Vec<BigRational> = (0..=t_max).map(|j| terminal(2 * j - t_max)).collect();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut values = vec![last];
    let mut bets = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        let next = values.last().expect("non-empty");
        let (row, bet): (Vec<_>, Vec<_>) = next
            .windows(2)
            .map(|w| ((&w[1] + &w[0]) / &two, (&w[1] - &w[0]) / &two))
            .unzip();
        values.push(row);
        bets.push(bet);
    }
    values.reverse();
    bets.reverse();
    Ok(DPTable {
        horizon,
        values,
        bets,
    })
}

/// Binomial coefficients `C(T, 0..=T)`.
pub fn binomials(horizon: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..horizon {
        let next = &row[k as usize] * BigInt::from(horizon - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// Cover's two conditions for a terminal payoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverCheck {
    /// `sum_x C(T, x) f(T - 2x) = 0`.
    pub sum_zero: bool,
    /// `|f(y + 2) - f(y)| <= 2` between consecutive reachable heights.
    pub lipschitz: bool,
}

impl CoverCheck {
    pub fn feasible(&self) -> bool {
        self.sum_zero && self.lipschitz
    }
}

pub fn cover_feasibility(terminal: impl Fn(i64) -> BigRational, horizon: u32) -> Result<CoverCheck> {
    if horizon > MAX_BINOMIAL_HORIZON {
        return domain(format!("horizon must be <= {MAX_BINOMIAL_HORIZON}, got {horizon}"));
    }
    let t = i64::from(horizon);
    let values: Vec<BigRational> = (0..=t).map(|k| terminal(t - 2 * k)).collect();
    let sum = binomials(horizon)
        .into_iter()
        .zip(&values)
        .fold(BigRational::zero(), |acc, (c, f)| acc + BigRational::from_integer(c) * f);
    let two = BigRational::from_integer(BigInt::from(2));
    let lipschitz = values.windows(2).all(|w| (&w[0] - &w[1]).abs() <= two);
    Ok(CoverCheck {
        sum_zero: sum.is_zero(),
        lipschitz,
    })
}

/// `E|S_T|` for a sum of `T` fair signs, exactly.
pub fn expected_abs_height(horizon: u32) -> Result<BigRational> {
    expectation(horizon, |x| BigRational::from_integer(BigInt::from(x.abs())))
}

/// `E f(S_T)` for a sum of `T` fair signs, exactly.
pub fn expectation(horizon: u32, f: impl Fn(i64) -> BigRational) -> Result<BigRational> {
    if horizon > MAX_BINOMIAL_HORIZON {
        return domain(format!("horizon must be <= {MAX_BINOMIAL_HORIZON}, got {horizon}"));
    }
    let t = i64::from(horizon);
    let total = binomials(horizon)
        .into_iter()
        .enumerate()
        .fold(BigRational::zero(), |acc, (k, c)| {
            acc + BigRational::from_integer(c) * f(t - 2 * k as i64)
        });
    Ok(total / BigRational::from_integer(BigInt::one() << horizon))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `(1 - rho^{2T}) / (1 - rho^2)`, the variance of the discounted height
/// after `T` fair signs.
pub fn alpha(rho: f64, horizon: u32) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return domain(format!("rho must be in (0, 1), got {rho}"));
    }
    let r2 = rho * rho;
    Ok((1.0 - r2.powi(horizon as i32)) / (1.0 - r2))
}

/// All `2^T` discounted heights `sum_t b_t rho^{T-t}`.
pub fn discounted_heights(horizon: u32, rho: f64) -> Result<Vec<f64>> {
    check_tree(horizon)?;
    let mut heights = vec![0.0];
    for _ in 0..horizon {
        heights = heights
            .iter()
            .flat_map(|&h| [rho * h + 1.0, rho * h - 1.0])
            .collect();
    }
    Ok(heights)
}

fn check_tree(horizon: u32) -> Result<()> {
    if horizon > MAX_TREE_HORIZON {
        return Err(Error::Resource(format!(
            "history tree of depth {horizon} exceeds {MAX_TREE_HORIZON}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscountedValue {
    /// Minimal discounted payoff needed at the root, `E f(h_T) / rho^T`.
    pub root_value: f64,
    pub max_abs_bet: f64,
}

/// Backward induction over the history tree under `a <- rho a + b bet`:
/// a node with children values `v+`, `v-` needs `(v+ + v-) / (2 rho)` and bets
/// `(v+ - v-) / 2`.
pub fn discounted_minimax(horizon: u32, rho: f64, terminal: impl Fn(f64) -> f64) -> Result<DiscountedValue> {
    check_tree(horizon)?;
    if !(rho > 0.0 && rho <= 1.0) {
        return domain(format!("rho must be in (0, 1], got {rho}"));
    }
    fn walk(h: f64, depth: u32, rho: f64, f: &dyn Fn(f64) -> f64, max_bet: &mut f64) -> f64 {
        if depth == 0 {
            return f(h);
        }
        let up = walk(rho * h + 1.0, depth - 1, rho, f, max_bet);
        let down = walk(rho * h - 1.0, depth - 1, rho, f, max_bet);
        *max_bet = max_bet.max(((up - down) / 2.0).abs());
        (up + down) / (2.0 * rho)
    }
    let mut max_abs_bet = 0.0;
    let root_value = walk(0.0, horizon, rho, &terminal, &mut max_abs_bet);
    Ok(DiscountedValue {
        root_value,
        max_abs_bet,
    })
}
