//! Two-expert regret trade-offs and the optimal steady-state regret constant.
//!
//! All regrets here are normalized by `sqrt(n)`.

use std::io::Write;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::specfun::{erfi, erfi_inverse, hermite_payoff, HermiteParams, FRAC_1_SQRT_PI};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// `erfi(sqrt(ln x))` for `x >= 1`.
pub fn t_func(x: f64) -> Result<f64> {
    if !(x >= 1.0) || !x.is_finite() {
        return domain(format!("t_func needs a finite x >= 1, got {x}"));
    }
    erfi(x.ln().sqrt())
}

/// [`t_func`] extended by 0 below 1.
pub fn t_extended(x: f64) -> f64 {
    if x < 1.0 {
        0.0
    } else {
        t_func(x).unwrap_or(f64::INFINITY)
    }
}

/// Regret `R` paired with loss `L` on the symmetric boundary:
/// `R = L e^{x0^2}` where `erfi(x0) = 1 / (sqrt(pi) L)`.
pub fn symmetric_tradeoff(loss: f64) -> Result<f64> {
    if !(loss > 0.0) || !loss.is_finite() {
        return domain(format!("loss must be positive and finite, got {loss}"));
    }
    let x0 = erfi_inverse(FRAC_1_SQRT_PI / loss)
        .map_err(|_| Error::Domain(format!("loss {loss} too small: erfi(x0) = 1/(sqrt(pi) L) has no root in [0, 8]")))?;
    Ok(loss * (x0 * x0).exp())
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x1, f1), (x2, f2), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, c| if c.1 < best.1 { c } else { best })
}

/// `alpha / (sqrt(pi) erfi(sqrt(ln alpha)))`.
pub fn regret_objective(alpha: f64) -> f64 {
    alpha / (SQRT_PI * t_extended(alpha))
}

/// Minimizer `alpha*` and minimum `C` of [`regret_objective`] over `[1, 100]`.
pub fn optimal_alpha() -> (f64, f64) {
    golden_min(regret_objective, 1.0 + 1e-9, 100.0, 1e-10)
}

/// The optimal steady-state regret constant `C ~ 0.9241`.
pub fn optimal_regret_constant() -> f64 {
    optimal_alpha().1
}

/// Outcome of the one-sided `alpha` search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneSidedCheck {
    pub feasible: bool,
    pub alpha_star: f64,
    /// `max_alpha T(alpha r1) + T(alpha r2) - alpha / sqrt(pi)`.
    pub margin: f64,
}

/// Searches `alpha` in `[1e-3, 1e3]` for `T(alpha r1) + T(alpha r2) >= alpha / sqrt(pi)`.
pub fn one_sided_feasible(r1: f64, r2: f64) -> Result<OneSidedCheck> {
    if !(r1 > 0.0 && r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
        return domain(format!("regrets must be positive and finite, got ({r1}, {r2})"));
    }
    let phi = |alpha: f64| t_extended(alpha * r1) + t_extended(alpha * r2) - alpha * FRAC_1_SQRT_PI;
    const GRID: usize = 1000;
    let at = |i: usize| 10f64.powf(-3.0 + 6.0 * i as f64 / (GRID - 1) as f64);
    let best = (0..GRID)
        .map(|i| (i, phi(at(i))))
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let lo = at(best.0.saturating_sub(1));
    let hi = at((best.0 + 1).min(GRID - 1));
    let (alpha, neg) = golden_min(|a| -phi(a), lo, hi, 1e-13 * hi);
    let (alpha_star, margin) = if -neg >= best.1 { (alpha, -neg) } else { (at(best.0), best.1) };
    Ok(OneSidedCheck {
        feasible: margin >= -1e-9,
        alpha_star,
        margin,
    })
}

/// Regret pair in one of the four equivalent parametrizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TradeoffPoint {
    /// Regret `r` and loss `l` with two-sided bets.
    TwoSided { r: f64, l: f64 },
    /// Regret and loss with bets in `[0, 1]`.
    OneSided { r_o: f64, l_o: f64 },
    /// Regrets against expert 1 and expert 2.
    Experts { r1: f64, r2: f64 },
    /// Regret to the max and regret to the average.
    MaxAvg { r_m: f64, r_a: f64 },
}

impl TradeoffPoint {
    fn components(&self) -> [f64; 2] {
        match *self {
            Self::TwoSided { r, l } => [r, l],
            Self::OneSided { r_o, l_o } => [r_o, l_o],
            Self::Experts { r1, r2 } => [r1, r2],
            Self::MaxAvg { r_m, r_a } => [r_m, r_a],
        }
    }
}

/// Maps prediction-game pairs to expert pairs and back:
/// `TwoSided(R, L) <-> MaxAvg(R/2, L/2)` and
/// `OneSided(R_o, L_o) <-> Experts(L_o, R_o)`.
pub fn experts_reductions(p: TradeoffPoint) -> Result<TradeoffPoint> {
    if p.components().iter().any(|v| !v.is_finite() || *v < 0.0) {
        return domain(format!("trade-off components must be finite and >= 0: {p:?}"));
    }
    Ok(match p {
        TradeoffPoint::TwoSided { r, l } => TradeoffPoint::MaxAvg { r_m: r / 2.0, r_a: l / 2.0 },
        TradeoffPoint::MaxAvg { r_m, r_a } => TradeoffPoint::TwoSided { r: 2.0 * r_m, l: 2.0 * r_a },
        TradeoffPoint::OneSided { r_o, l_o } => TradeoffPoint::Experts { r1: l_o, r2: r_o },
        TradeoffPoint::Experts { r1, r2 } => TradeoffPoint::OneSided { r_o: r2, l_o: r1 },
    })
}

/// One point of the one-sided boundary and the Hermite parameters behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub c1: f64,
    pub c2: f64,
    /// `L_o = -F(x1)` where `F'(x1) = 0`; regret against expert 1.
    pub r1: f64,
    /// `R_o = x0 - F(x0)` where `F'(x0) = 1`; regret against expert 2.
    pub r2: f64,
}

impl BoundaryPoint {
    pub fn experts(&self) -> TradeoffPoint {
        TradeoffPoint::Experts { r1: self.r1, r2: self.r2 }
    }
}

/// Boundary point for a given `c2 in (0, 1)`: `c1 = 1/s` where `s` solves
/// `e^{u^2}/u + e^{v^2}/v = sqrt(pi) s`, `erfi(u) = c2 s`, `erfi(v) = (1 - c2) s`.
pub fn boundary_point(c2: f64) -> Result<BoundaryPoint> {
    if !(c2 > 0.0 && c2 < 1.0) {
        return domain(format!("c2 must be in (0, 1), got {c2}"));
    }
    let term = |w: f64| -> Result<f64> {
        let u = erfi_inverse(w)?;
        Ok((u * u).exp() / u)
    };
    let h = |s: f64| -> Result<f64> { Ok(term(c2 * s)? + term((1.0 - c2) * s)? - SQRT_PI * s) };
    let (mut lo, mut hi) = (1e-6_f64, 1e6_f64);
    if h(lo)? <= 0.0 || h(hi)? >= 0.0 {
        return Err(Error::Construction(format!("no envelope root bracketed for c2 = {c2}")));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = (lo * hi).sqrt();
    let c1 = 1.0 / s;
    let p = HermiteParams::new(c1, c2)?;
    let x1 = erfi_inverse(-c2 * s)?;
    let x0 = erfi_inverse((1.0 - c2) * s)?;
    Ok(BoundaryPoint {
        c1,
        c2,
        r1: -hermite_payoff(p, x1)?,
        r2: x0 - hermite_payoff(p, x0)?,
    })
}

/// Smallest `c2` whose boundary regrets both stay below `C`.
pub fn boundary_c2_min() -> Result<f64> {
    let c = optimal_regret_constant();
    let (mut lo, mut hi) = (1e-6, 0.5);
    if boundary_point(lo)?.r2 <= c {
        return Ok(lo);
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if boundary_point(mid)?.r2 > c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// `points` boundary points with `c2` evenly spaced strictly inside
/// `(c2_min, 1 - c2_min)`, ordered by increasing `r1`.
pub fn one_sided_curve(points: usize) -> Result<Vec<BoundaryPoint>> {
    if points < 2 {
        return domain(format!("need at least 2 points, got {points}"));
    }
    let c2_min = boundary_c2_min()?;
    let span = 1.0 - 2.0 * c2_min;
    (0..points)
        .map(|i| boundary_point(c2_min + span * (i + 1) as f64 / (points + 1) as f64))
        .collect()
}

/// CSV `r1,r2` with a metadata line naming the parametrization.
pub fn write_tradeoff_csv<W: Write>(points: &[BoundaryPoint], mut out: W, meta: &[String]) -> Result<()> {
    writeln!(out, "# parametrization=one-sided boundary, regrets normalized by sqrt(n)")?;
    for line in meta {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r1", "r2"])?;
    for p in points {
        w.write_record([p.r1.to_string(), p.r2.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
