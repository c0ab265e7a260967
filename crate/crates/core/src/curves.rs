//! Tabulated payoff curves and steady-state feasibility.
//!
//! A curve `f` on a uniform grid over `[-W, W]` (normally `W = n`) is feasible
//! for window size `n` (`rho = 1 - 1/n`) when
//!
//! ```text
//! f(x) >= (f(rho x + 1) + f(rho x - 1)) / (2 rho)   and   f(0) <= 0,
//! ```
//!
//! in which case betting `(f(rho x + 1) - f(rho x - 1)) / 2` at discounted
//! height `x` keeps the discounted payoff above `f` at all times. Values
//! between grid nodes are linear interpolants.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::specfun::{
    hermite_payoff, CappedHermite, HermiteParams, FRAC_1_SQRT_PI, MAX_HERMITE_ARG,
};

/// Margins, bets and `f(0)` within this of the bound are treated as on it.
pub const ROUNDING_SLACK: f64 = 1e-11;

/// Default tolerance for [`check_feasible`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default grid spacing.
pub const DEFAULT_GRID_STEP: f64 = 0.125;

const MAX_SHIFT: f64 = 10.0;
const SHIFT_RESOLUTION: f64 = 1e-6;
const MAX_DAMPING: f64 = 64.0;
const DAMPING_RESOLUTION: f64 = 1e-3;

/// Checks that `h = 2^-k` for `0 <= k <= 10`; returns `k`.
pub fn dyadic_exponent(h: f64) -> Result<u32> {
    (0..=10)
        .find(|&k| h == 0.5_f64.powi(k as i32))
        .ok_or_else(|| Error::Domain(format!("grid step {h} is not 2^-k with k <= 10")))
}

/// Renders a dyadic grid step as `1/2^k`.
pub fn format_grid_step(h: f64) -> String {
    match dyadic_exponent(h) {
        Ok(0) => "1".to_string(),
        Ok(k) => format!("1/{}", 1u32 << k),
        Err(_) => format!("{h}"),
    }
}

/// Parses `1/8`, `0.125` or `1`.
pub fn parse_grid_step(s: &str) -> Result<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| Error::Parse(format!("bad grid step {s}")))?;
            let den: f64 = den.trim().parse().map_err(|_| Error::Parse(format!("bad grid step {s}")))?;
            num / den
        }
        None => s.parse().map_err(|_| Error::Parse(format!("bad grid step {s}")))?,
    };
    dyadic_exponent(value)?;
    Ok(value)
}

/// Payoff function tabulated at `x = -W, -W + h, ..., W`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffCurve {
    n: u32,
    grid_step: f64,
    half_width: f64,
    values: Vec<f64>,
    bounded_bets: bool,
}

impl PayoffCurve {
    /// Full-domain curve on `[-n, n]`.
    pub fn new(n: u32, grid_step: f64, values: Vec<f64>, bounded_bets: bool) -> Result<Self> {
        Self::with_half_width(n, grid_step, f64::from(n), values, bounded_bets)
    }

    /// Curve on `[-half_width, half_width]`; `half_width` must be a multiple
    /// of the grid step and at most `n`.
    pub fn with_half_width(
        n: u32,
        grid_step: f64,
        half_width: f64,
        values: Vec<f64>,
        bounded_bets: bool,
    ) -> Result<Self> {
        if n < 2 {
            return domain(format!("window size must be >= 2, got {n}"));
        }
        dyadic_exponent(grid_step)?;
        let cells = half_width / grid_step;
        if !(half_width > 0.0) || cells.fract() != 0.0 || half_width > f64::from(n) {
            return domain(format!(
                "half width {half_width} must be a positive multiple of {grid_step} not exceeding {n}"
            ));
        }
        let expected = 2 * cells as usize + 1;
        if values.len() != expected {
            return domain(format!("expected {expected} values, got {}", values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("non-finite value at index {i}"));
        }
        Ok(Self {
            n,
            grid_step,
            half_width,
            values,
            bounded_bets,
        })
    }

    /// Tabulates `f` over `[-n, n]`.
    pub fn from_fn(
        n: u32,
        grid_step: f64,
        bounded_bets: bool,
        f: impl FnMut(f64) -> Result<f64>,
    ) -> Result<Self> {
        Self::from_fn_with_half_width(n, grid_step, f64::from(n), bounded_bets, f)
    }

    pub fn from_fn_with_half_width(
        n: u32,
        grid_step: f64,
        half_width: f64,
        bounded_bets: bool,
        mut f: impl FnMut(f64) -> Result<f64>,
    ) -> Result<Self> {
        dyadic_exponent(grid_step)?;
        let cells = (half_width / grid_step).round() as usize;
        let values = (0..=2 * cells)
            .map(|i| f(-half_width + i as f64 * grid_step))
            .collect::<Result<Vec<_>>>()?;
        Self::with_half_width(n, grid_step, half_width, values, bounded_bets)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rho(&self) -> f64 {
        1.0 - 1.0 / f64::from(self.n)
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn bounded_bets(&self) -> bool {
        self.bounded_bets
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x_at(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.grid_step
    }

    /// `(x, f(x))` for every grid node.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.x_at(i), v))
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half_width + 1e-9
    }

    /// Linear interpolation; errors outside the tabulated range.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        if !self.contains(x) || !x.is_finite() {
            return domain(format!("x = {x} outside [-{w}, {w}]", w = self.half_width));
        }
        Ok(self.interpolate(x))
    }

    fn interpolate(&self, x: f64) -> f64 {
        let pos = ((x + self.half_width) / self.grid_step).max(0.0);
        let last = self.values.len() - 1;
        let i = (pos.floor() as usize).min(last);
        if i == last {
            return self.values[last];
        }
        let t = pos - i as f64;
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// The same curve moved down by `k`.
    pub fn shifted(&self, k: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v - k).collect(),
            ..self.clone()
        }
    }

    /// Writes the curve file format: metadata line, optional extra comment
    /// lines, header `x,f`, one row per node.
    pub fn write_csv<W: Write>(&self, mut out: W, extra_meta: &[String]) -> Result<()> {
        writeln!(
            out,
            "# n={} grid_step={} bounded={}",
            self.n,
            format_grid_step(self.grid_step),
            u8::from(self.bounded_bets)
        )?;
        for line in extra_meta {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "f"])?;
        for (x, f) in self.nodes() {
            w.write_record([x.to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the curve file format written by [`PayoffCurve::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let text = std::io::read_to_string(input)?;
        let meta = text
            .lines()
            .map(str::trim)
            .find(|l| l.starts_with('#') && l.contains("n="))
            .ok_or_else(|| Error::Parse("missing '# n=... grid_step=... bounded=...' line".into()))?;
        let (mut n, mut step, mut bounded) = (None, None, None);
        for field in meta.trim_start_matches('#').split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => {
                    n = Some(v.parse::<u32>().map_err(|_| Error::Parse(format!("bad n {v}")))?)
                }
                Some(("grid_step", v)) => step = Some(parse_grid_step(v)?),
                Some(("bounded", "0")) => bounded = Some(false),
                Some(("bounded", "1")) => bounded = Some(true),
                Some(("bounded", v)) => return Err(Error::Parse(format!("bad bounded flag {v}"))),
                _ => {}
            }
        }
        let (n, step, bounded) = match (n, step, bounded) {
            (Some(n), Some(s), Some(b)) => (n, s, b),
            _ => return Err(Error::Parse(format!("incomplete metadata line: {meta}"))),
        };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "f" {
            return Err(Error::Parse(format!("expected header x,f, got {headers:?}")));
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {s}")))
            };
            xs.push(parse(&record[0])?);
            values.push(parse(&record[1])?);
        }
        let first = *xs.first().ok_or_else(|| Error::Parse("curve file has no rows".into()))?;
        let half_width = -first;
        for (i, &x) in xs.iter().enumerate() {
            if (x - (first + i as f64 * step)).abs() > 1e-9 {
                return Err(Error::Parse(format!(
                    "row {i}: x = {x} is not on the uniform grid starting at {first} with step {step}"
                )));
            }
        }
        Self::with_half_width(n, step, half_width, values, bounded)
    }
}

/// `f(x) - (f(rho x + 1) + f(rho x - 1)) / (2 rho)`; nonnegative exactly
/// where the recursion inequality holds.
pub fn recursion_residual(curve: &PayoffCurve, x: f64) -> Result<f64> {
    let rho = curve.rho();
    let here = curve.value_at(x)?;
    let up = curve.value_at(rho * x + 1.0)?;
    let down = curve.value_at(rho * x - 1.0)?;
    Ok(here - (up + down) / (2.0 * rho))
}

/// Bet `(f(rho x + 1) - f(rho x - 1)) / 2` induced by the curve at height `x`.
pub fn induced_bet(curve: &PayoffCurve, x: f64) -> Result<f64> {
    let rho = curve.rho();
    Ok((curve.value_at(rho * x + 1.0)? - curve.value_at(rho * x - 1.0)?) / 2.0)
}

/// Outcome of a feasibility scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Minimum recursion residual over the scanned heights.
    pub min_margin: f64,
    pub argmin_x: f64,
    /// `f(0) <= 0`.
    pub origin_ok: bool,
    /// Grid slopes within 1 and every induced bet within `[-1, 1]`.
    /// Only required when the curve is flagged `bounded_bets`.
    pub lipschitz_ok: bool,
    pub max_abs_bet: f64,
    pub points_checked: usize,
    /// Heights skipped because `rho x +- 1` leaves the tabulated range.
    pub points_skipped: usize,
}

/// Heights where the residual of the interpolated curve can change slope:
/// grid nodes and their pre-images `(g +- 1) / rho`. Both the residual and the
/// induced bet are affine between consecutive breakpoints, so checking them
/// here checks every real height.
fn breakpoints(curve: &PayoffCurve) -> (Vec<f64>, usize) {
    let rho = curve.rho();
    let w = curve.half_width() + 1e-9;
    let mut pts = Vec::with_capacity(3 * curve.len());
    let mut skipped = 0;
    for (g, _) in curve.nodes() {
        for x in [g, (g - 1.0) / rho, (g + 1.0) / rho] {
            if x.abs() <= w && (rho * x + 1.0).abs() <= w && (rho * x - 1.0).abs() <= w {
                pts.push(x);
            } else if x.abs() <= w {
                skipped += 1;
            }
        }
    }
    (pts, skipped)
}

/// Scans the recursion inequality, the origin condition and, for
/// bounded-bet curves, the slope bound.
pub fn check_feasible(curve: &PayoffCurve, tolerance: f64) -> FeasibilityReport {
    let rho = curve.rho();
    let (pts, skipped) = breakpoints(curve);
    let mut min_margin = f64::INFINITY;
    let mut argmin_x = f64::NAN;
    let mut max_abs_bet: f64 = 0.0;
    for &x in &pts {
        let here = curve.interpolate(x);
        let up = curve.interpolate(rho * x + 1.0);
        let down = curve.interpolate(rho * x - 1.0);
        let margin = here - (up + down) / (2.0 * rho);
        if margin < min_margin {
            min_margin = margin;
            argmin_x = x;
        }
        max_abs_bet = max_abs_bet.max(((up - down) / 2.0).abs());
    }
    let h = curve.grid_step();
    let slopes_ok = curve
        .values()
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() <= h * (1.0 + tolerance) + ROUNDING_SLACK);
    let lipschitz_ok = slopes_ok && max_abs_bet <= 1.0 + tolerance + ROUNDING_SLACK;
    let origin_ok = curve.interpolate(0.0) <= ROUNDING_SLACK;
    let margin_ok = pts.is_empty() || min_margin >= -(tolerance + ROUNDING_SLACK);
    FeasibilityReport {
        feasible: margin_ok && origin_ok && (lipschitz_ok || !curve.bounded_bets()),
        min_margin,
        argmin_x,
        origin_ok,
        lipschitz_ok,
        max_abs_bet,
        points_checked: pts.len(),
        points_skipped: skipped,
    }
}

/// Smallest shift `K` in `[0, max]` (to [`SHIFT_RESOLUTION`]) for which
/// `base - K` passes [`check_feasible`] at tolerance 0.
fn minimal_shift(base: &PayoffCurve, max: f64) -> Option<f64> {
    let passes = |k: f64| check_feasible(&base.shifted(k), 0.0).feasible;
    if passes(0.0) {
        return Some(0.0);
    }
    if !passes(max) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, max);
    while hi - lo > SHIFT_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// A constructed feasible curve together with the downward shift it needed.
#[derive(Debug, Clone)]
pub struct ShiftedCurve {
    pub curve: PayoffCurve,
    pub shift: f64,
}

/// Bounded-bet construction `f(x) = sqrt(n) Fhat(x / sqrt(n)) - K` with the
/// smallest `K <= 10` that makes `f` feasible.
pub fn make_feasible_bounded(p: HermiteParams, n: u32, grid_step: f64) -> Result<ShiftedCurve> {
    if n < 4 {
        return domain(format!("window size must be >= 4, got {n}"));
    }
    let capped = CappedHermite::new(p)?;
    let scale = f64::from(n).sqrt();
    let base = PayoffCurve::from_fn(n, grid_step, true, |x| {
        Ok(scale * capped.eval(x / scale)?.0)
    })?;
    let shift = minimal_shift(&base, MAX_SHIFT).ok_or_else(|| {
        let report = check_feasible(&base.shifted(MAX_SHIFT), 0.0);
        Error::Construction(format!(
            "no shift <= {MAX_SHIFT} makes the capped curve feasible for {p:?}, n={n} \
             (margin {:.3e} at x={}, max bet {:.6})",
            report.min_margin, report.argmin_x, report.max_abs_bet
        ))
    })?;
    Ok(ShiftedCurve {
        curve: base.shifted(shift),
        shift,
    })
}

/// Unbounded-bet construction: damping exponent and downward shift.
#[derive(Debug, Clone)]
pub struct DampedCurve {
    pub curve: PayoffCurve,
    pub beta: f64,
    pub shift: f64,
}

/// Half width `sqrt(n ln n)` rounded down to the grid.
pub fn unbounded_half_width(n: u32, grid_step: f64) -> f64 {
    let nf = f64::from(n);
    ((nf * nf.ln()).sqrt() / grid_step).floor() * grid_step
}

/// Unbounded-bet construction
/// `f(x) = sqrt(n) F(y) exp(-beta (y^2/n + 1/n)) - K`, `y = x / sqrt(n)`,
/// on `|y| <= sqrt(ln n)`. Returns the smallest `beta` in `[0, 64]` (to 1e-3)
/// for which some `K <= 10` passes the scan, and that minimal `K`.
pub fn make_feasible_unbounded(p: HermiteParams, n: u32, grid_step: f64) -> Result<DampedCurve> {
    if n < 4 {
        return domain(format!("window size must be >= 4, got {n}"));
    }
    if p.c1 < 0.0 {
        return domain(format!("unbounded construction requires c1 >= 0, got {}", p.c1));
    }
    let nf = f64::from(n);
    let scale = nf.sqrt();
    let half_width = unbounded_half_width(n, grid_step);
    if half_width / scale > MAX_HERMITE_ARG {
        return domain(format!("n = {n} puts sqrt(ln n) beyond {MAX_HERMITE_ARG}"));
    }
    let damped = |beta: f64| {
        PayoffCurve::from_fn_with_half_width(n, grid_step, half_width, false, |x| {
            let y = x / scale;
            Ok(scale * hermite_payoff(p, y)? * (-beta * (y * y / nf + 1.0 / nf)).exp())
        })
    };
    let attempt = |beta: f64| -> Result<Option<(PayoffCurve, f64)>> {
        let base = damped(beta)?;
        Ok(minimal_shift(&base, MAX_SHIFT).map(|k| (base.shifted(k), k)))
    };
    if let Some((curve, shift)) = attempt(0.0)? {
        return Ok(DampedCurve {
            curve,
            beta: 0.0,
            shift,
        });
    }
    if attempt(MAX_DAMPING)?.is_none() {
        return Err(Error::Construction(format!(
            "no damping beta <= {MAX_DAMPING} with shift <= {MAX_SHIFT} works for {p:?}, n={n}"
        )));
    }
    let (mut lo, mut hi) = (0.0, MAX_DAMPING);
    while hi - lo > DAMPING_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if attempt(mid)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (curve, shift) = attempt(hi)?.expect("upper bracket passes");
    Ok(DampedCurve {
        curve,
        beta: hi,
        shift,
    })
}

/// Samples `f` on the symmetric grid `[-half_width, half_width]`.
pub fn sample_symmetric(
    half_width: f64,
    grid_step: f64,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<Vec<f64>> {
    let cells = (half_width / grid_step).round() as usize;
    (0..=2 * cells)
        .map(|i| f(-half_width + i as f64 * grid_step))
        .collect()
}

/// Index of grid node `x` on a symmetric grid of `len` nodes, if `x` is a node.
fn node_index(len: usize, grid_step: f64, x: f64) -> Option<usize> {
    if len.is_multiple_of(2) {
        return None;
    }
    let mid = (len / 2) as f64;
    let pos = mid + x / grid_step;
    let i = pos.round();
    if (pos - i).abs() > 1e-6 || i < 0.0 || i >= len as f64 {
        return None;
    }
    Some(i as usize)
}

fn operator_at(g: &[f64], i: usize, stride: usize, h: f64, x: f64) -> f64 {
    let (l, c, r) = (g[i - stride], g[i], g[i + stride]);
    let second = (r - 2.0 * c + l) / (h * h);
    let first = (r - l) / (2.0 * h);
    second - 2.0 * x * first + 2.0 * c
}

/// Central-difference estimate of `g'' - 2 x g' + 2 g` at grid node `x`.
///
/// `g_values` is sampled on a symmetric grid centred at 0. `x` must be a node
/// with at least two nodes on either side.
pub fn differential_residual(g_values: &[f64], grid_step: f64, x: f64) -> Result<f64> {
    let i = interior_node(g_values, grid_step, x)?;
    Ok(operator_at(g_values, i, 1, grid_step, x))
}

/// Richardson combination `(4 R(h) - R(2h)) / 3` of
/// [`differential_residual`], cancelling the `h^2` error term.
pub fn differential_residual_extrapolated(g_values: &[f64], grid_step: f64, x: f64) -> Result<f64> {
    let i = interior_node(g_values, grid_step, x)?;
    let fine = operator_at(g_values, i, 1, grid_step, x);
    let coarse = operator_at(g_values, i, 2, 2.0 * grid_step, x);
    Ok((4.0 * fine - coarse) / 3.0)
}

fn interior_node(g_values: &[f64], grid_step: f64, x: f64) -> Result<usize> {
    let i = node_index(g_values.len(), grid_step, x)
        .ok_or_else(|| Error::Domain(format!("x = {x} is not a node of the symmetric grid")))?;
    if i < 2 || i + 2 >= g_values.len() {
        return domain(format!("x = {x} is within two nodes of the boundary"));
    }
    Ok(i)
}

/// Hermite solution matching `g` and `g'` at the origin, and whether it
/// dominates `g` on the whole grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domination {
    pub params: HermiteParams,
    pub dominated: bool,
    /// `max (g - F)` over the grid, floored at 0.
    pub max_violation: f64,
}

/// Fits `c1 = -sqrt(pi) g(0)` and `c2 = g'(0)` and compares `g <= F + 1e-6`
/// on the grid. The grid must be symmetric, contain 0 and stay within
/// `|x| <= 8`.
pub fn dominating_hermite(g_values: &[f64], grid_step: f64) -> Result<Domination> {
    let centre = node_index(g_values.len(), grid_step, 0.0)
        .ok_or_else(|| Error::Domain("grid must be symmetric around 0".into()))?;
    if centre == 0 {
        return domain("grid needs neighbours of 0");
    }
    let half_width = centre as f64 * grid_step;
    if half_width > MAX_HERMITE_ARG {
        return domain(format!("grid half width {half_width} exceeds {MAX_HERMITE_ARG}"));
    }
    let c1 = -g_values[centre] / FRAC_1_SQRT_PI;
    let c2 = (g_values[centre + 1] - g_values[centre - 1]) / (2.0 * grid_step);
    let params = HermiteParams::new(c1, c2)?;
    let mut max_violation: f64 = 0.0;
    for (i, &g) in g_values.iter().enumerate() {
        let x = (i as f64 - centre as f64) * grid_step;
        max_violation = max_violation.max(g - hermite_payoff(params, x)?);
    }
    Ok(Domination {
        params,
        dominated: max_violation <= 1e-6,
        max_violation,
    })
}

/// `max_x |x| - f(x)` over the grid.
pub fn regret_of(curve: &PayoffCurve) -> f64 {
    curve
        .nodes()
        .map(|(x, f)| x.abs() - f)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `-min_x f(x)` over the grid.
pub fn loss_of(curve: &PayoffCurve) -> f64 {
    -curve.values().iter().copied().fold(f64::INFINITY, f64::min)
}
