//! Imaginary error function and the two-parameter family of Hermite-equation
//! solutions used as steady-state payoff curves.
//!
//! `F(x) = c1 (x erfi(x) - e^{x^2}/sqrt(pi)) + c2 x` solves
//! `g'' - 2 x g' + 2 g = 0`, with `F'(x) = c1 erfi(x) + c2` and
//! `F''(x) = (2 c1 / sqrt(pi)) e^{x^2}`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// 2 / sqrt(pi)
pub const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
/// 1 / sqrt(pi)
pub const FRAC_1_SQRT_PI: f64 = 0.5 * std::f64::consts::FRAC_2_SQRT_PI;

/// Largest |x| accepted by [`hermite_payoff`] and friends. `e^{x^2}` is still
/// far from overflow here, and cap points beyond it would need `c1 < 1e-27`.
pub const MAX_HERMITE_ARG: f64 = 8.0;

const SERIES_LIMIT: f64 = 3.0;
const ASYMPTOTIC_LIMIT: f64 = 10.0;

/// Imaginary error function `(2/sqrt(pi)) * int_0^x e^{t^2} dt`.
///
/// Overflows to `+-inf` once `|x|` exceeds roughly 26.6.
pub fn erfi(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("erfi: non-finite argument {x}"));
    }
    if x.abs() <= SERIES_LIMIT {
        Ok(erfi_series(x))
    } else {
        Ok(TWO_OVER_SQRT_PI * (x * x).exp() * dawson_unchecked(x))
    }
}

/// Maclaurin series; every term has the sign of `x`, so there is no cancellation.
fn erfi_series(x: f64) -> f64 {
    let x2 = x * x;
    // power = x^{2k+1} / k!
    let mut power = x;
    let mut sum = 0.0;
    for k in 0..200u32 {
        let term = power / f64::from(2 * k + 1);
        sum += term;
        if k >= 30 && term.abs() < 1e-17 * sum.abs() {
            break;
        }
        power *= x2 / f64::from(k + 1);
    }
    TWO_OVER_SQRT_PI * sum
}

/// Dawson's integral `D(x) = e^{-x^2} int_0^x e^{t^2} dt`.
pub fn dawson(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("dawson: non-finite argument {x}"));
    }
    Ok(dawson_unchecked(x))
}

fn dawson_unchecked(x: f64) -> f64 {
    if x.abs() >= ASYMPTOTIC_LIMIT {
        return dawson_asymptotic(x);
    }
    // D(x) = x / (1 + 2x^2/(3 - 4x^2/(5 + 6x^2/(7 - ...)))), evaluated bottom-up.
    let x2 = x * x;
    let levels = (2.0 * x2).ceil() as u32 + 40;
    let mut tail = 0.0;
    for k in (1..=levels).rev() {
        let kf = f64::from(k);
        let num = 2.0 * kf * x2;
        let den = 2.0 * kf + 1.0 + tail;
        tail = if k % 2 == 1 { num / den } else { -num / den };
    }
    x / (1.0 + tail)
}

/// `D(x) ~ (1/2x) sum_k (2k-1)!! / (2x^2)^k`; the smallest term at |x| >= 10
/// is below e^{-100}.
fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80u32 {
        let next = term * f64::from(2 * k - 1) * inv;
        if next.abs() > term.abs() || next.abs() < 1e-18 * sum {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * x)
}

/// `x D(x) - 1/2`, computed without cancellation for large |x|.
fn x_dawson_minus_half(x: f64) -> f64 {
    if x.abs() < ASYMPTOTIC_LIMIT {
        return x * dawson_unchecked(x) - 0.5;
    }
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 0.5;
    let mut sum = 0.0;
    for k in 1..80u32 {
        let next = term * f64::from(2 * k - 1) * inv;
        if next.abs() > term.abs() && k > 1 {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Solves `erfi(x) = value` by bisection on `[-MAX_HERMITE_ARG, MAX_HERMITE_ARG]`.
pub fn erfi_inverse(value: f64) -> Result<f64> {
    if !value.is_finite() {
        return domain(format!("erfi_inverse: non-finite value {value}"));
    }
    let limit = erfi_series_or_dawson(MAX_HERMITE_ARG);
    if value.abs() > limit {
        return domain(format!(
            "erfi_inverse: |{value}| exceeds erfi({MAX_HERMITE_ARG})"
        ));
    }
    let target = value.abs();
    let (mut lo, mut hi) = (0.0_f64, MAX_HERMITE_ARG);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if erfi_series_or_dawson(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(if value < 0.0 { -root } else { root })
}

fn erfi_series_or_dawson(x: f64) -> f64 {
    if x.abs() <= SERIES_LIMIT {
        erfi_series(x)
    } else {
        TWO_OVER_SQRT_PI * (x * x).exp() * dawson_unchecked(x)
    }
}

/// Coefficients selecting one solution of the Hermite equation: `c1` scales
/// the even solution, `c2` the linear one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteParams {
    pub c1: f64,
    pub c2: f64,
}

impl HermiteParams {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() {
            return domain(format!("hermite params must be finite, got ({c1}, {c2})"));
        }
        Ok(Self { c1, c2 })
    }

    /// The symmetric member whose capped curve attains the optimal regret:
    /// `c1 = 1/erfi(x*)` where `x*` solves `F_{1,0}(x*) = 0`.
    pub fn optimal_symmetric() -> Self {
        let x_star = optimal_cap_point();
        Self {
            c1: 1.0 / erfi_series_or_dawson(x_star),
            c2: 0.0,
        }
    }
}

/// Positive root of `x erfi(x) = e^{x^2}/sqrt(pi)`, i.e. the zero of `F_{1,0}`.
pub fn optimal_cap_point() -> f64 {
    let g = |x: f64| x * erfi_series_or_dawson(x) - (x * x).exp() * FRAC_1_SQRT_PI;
    let (mut lo, mut hi) = (0.1_f64, 3.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > MAX_HERMITE_ARG {
        return domain(format!(
            "hermite argument {x} outside [-{MAX_HERMITE_ARG}, {MAX_HERMITE_ARG}]"
        ));
    }
    Ok(())
}

/// `F_{c1,c2}(x) = c1 (x erfi(x) - e^{x^2}/sqrt(pi)) + c2 x` for `|x| <= 8`.
pub fn hermite_payoff(p: HermiteParams, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(p.c1 * (x * erfi(x)? - (x * x).exp() * FRAC_1_SQRT_PI) + p.c2 * x)
}

/// `F'(x) = c1 erfi(x) + c2`.
pub fn hermite_payoff_derivative(p: HermiteParams, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(p.c1 * erfi(x)? + p.c2)
}

/// `F''(x) = (2 c1 / sqrt(pi)) e^{x^2}`.
pub fn hermite_payoff_second_derivative(p: HermiteParams, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(p.c1 * TWO_OVER_SQRT_PI * (x * x).exp())
}

/// `F(x) e^{-x^2} / sqrt(pi)`, evaluated stably for any finite `x`.
///
/// This is the integrand of the Gaussian orthogonality identity; it decays
/// like `c1 / (2 pi x^2)`, so it stays accurate far past the range where
/// `F` itself is representable.
pub fn gaussian_weighted_payoff(p: HermiteParams, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("non-finite argument {x}"));
    }
    let even = TWO_OVER_SQRT_PI * x_dawson_minus_half(x);
    Ok((p.c1 * even + p.c2 * x * (-x * x).exp()) * FRAC_1_SQRT_PI)
}

/// Cap points of `F'`: the slope lies in `[-1, 1]` exactly on `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapPoints {
    pub lower: f64,
    pub upper: f64,
}

/// `F` with its slope capped to `[-1, 1]`.
///
/// Inside the cap interval the curve is `F` itself; outside it continues as
/// the tangent line of slope `+-1`, so the result is continuous and 1-Lipschitz.
#[derive(Debug, Clone, Copy)]
pub struct CappedHermite {
    params: HermiteParams,
    shape: CapShape,
}

#[derive(Debug, Clone, Copy)]
enum CapShape {
    /// `c1 > 0`: Hermite core between two tangent rays.
    Core {
        caps: CapPoints,
        at_lower: f64,
        at_upper: f64,
    },
    /// `c1 = 0`, `|c2| <= 1`: F is already 1-Lipschitz.
    Linear,
    /// `c1 = 0`, `|c2| > 1`: every point is capped, slope `sign(c2)`.
    Saturated(f64),
}

impl CappedHermite {
    pub fn new(params: HermiteParams) -> Result<Self> {
        if params.c1 < 0.0 {
            return domain(format!("capped hermite requires c1 >= 0, got {}", params.c1));
        }
        let shape = if params.c1 == 0.0 {
            if params.c2.abs() <= 1.0 {
                CapShape::Linear
            } else {
                CapShape::Saturated(params.c2.signum())
            }
        } else {
            let upper = erfi_inverse((1.0 - params.c2) / params.c1)?;
            let lower = erfi_inverse((-1.0 - params.c2) / params.c1)?;
            CapShape::Core {
                caps: CapPoints { lower, upper },
                at_lower: hermite_payoff(params, lower)?,
                at_upper: hermite_payoff(params, upper)?,
            }
        };
        Ok(Self { params, shape })
    }

    pub fn params(&self) -> HermiteParams {
        self.params
    }

    /// `None` when no capping happens anywhere (`c1 = 0`, `|c2| <= 1`).
    pub fn cap_points(&self) -> Option<CapPoints> {
        match self.shape {
            CapShape::Core { caps, .. } => Some(caps),
            CapShape::Saturated(_) => Some(CapPoints {
                lower: 0.0,
                upper: 0.0,
            }),
            CapShape::Linear => None,
        }
    }

    /// Returns `(value, slope)` of the capped curve at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        if !x.is_finite() {
            return domain(format!("non-finite argument {x}"));
        }
        match self.shape {
            CapShape::Linear => Ok((self.params.c2 * x, self.params.c2)),
            CapShape::Saturated(s) => Ok((s * x, s)),
            CapShape::Core {
                caps,
                at_lower,
                at_upper,
            } => {
                if x > caps.upper {
                    Ok((at_upper + (x - caps.upper), 1.0))
                } else if x < caps.lower {
                    Ok((at_lower - (x - caps.lower), -1.0))
                } else {
                    Ok((
                        hermite_payoff(self.params, x)?,
                        hermite_payoff_derivative(self.params, x)?,
                    ))
                }
            }
        }
    }
}

/// One-shot evaluation of the capped curve; see [`CappedHermite`].
pub fn capped_hermite(p: HermiteParams, x: f64) -> Result<(f64, f64)> {
    CappedHermite::new(p)?.eval(x)
}
