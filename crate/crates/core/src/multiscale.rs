//! Residual checker for the two-scale system of partial differential
//! inequalities on a square box.
//!
//! With `D = d1 + d2`:
//!
//! ```text
//! E1 = -D^2 g1 / 2 + (a1^2 x1 d1 + a2^2 x2 d2) g1 - a1^2 g1 >= 0
//! E2 = -D^2 g2 / 2 + (a1^2 x1 d1 + a2^2 x2 d2) g2 - a2^2 g2 >= 0
//! E1 + E2 - |D (g1 - g2)| >= 0
//! ```

use std::io::Read;

use serde::Serialize;

use crate::error::{domain, Error, Result};

pub const DEFAULT_BOUND: f64 = 3.0;
pub const DEFAULT_STEP: f64 = 0.02;
pub const MAX_STEP: f64 = 0.05;

/// Two fields sampled at `x1, x2 = -B, -B + h, ..., B`, stored row-major in
/// `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    a1: f64,
    a2: f64,
    bound: f64,
    step: f64,
    side: usize,
    g1: Vec<f64>,
    g2: Vec<f64>,
}

fn side_for(bound: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= MAX_STEP) {
        return domain(format!("grid step must be in (0, {MAX_STEP}], got {step}"));
    }
    if !(bound > 0.0) || !bound.is_finite() {
        return domain(format!("box bound must be positive, got {bound}"));
    }
    let cells = bound / step;
    if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
        return domain(format!("bound {bound} is not a multiple of step {step}"));
    }
    Ok(2 * cells.round() as usize + 1)
}

impl ScaleGrid {
    pub fn new(a1: f64, a2: f64, bound: f64, step: f64, g1: Vec<f64>, g2: Vec<f64>) -> Result<Self> {
        if !(a1 > 0.0 && a2 > 0.0) || !a1.is_finite() || !a2.is_finite() {
            return domain(format!("scale factors must be positive, got ({a1}, {a2})"));
        }
        if a1 == a2 {
            return domain("scale factors must differ");
        }
        let side = side_for(bound, step)?;
        for (name, g) in [("g1", &g1), ("g2", &g2)] {
            if g.len() != side * side {
                return domain(format!("{name} has {} values, expected {}", g.len(), side * side));
            }
            if let Some(i) = g.iter().position(|v| !v.is_finite()) {
                return domain(format!("{name} is not finite at index {i}"));
            }
        }
        Ok(Self {
            a1,
            a2,
            bound,
            step,
            side,
            g1,
            g2,
        })
    }

    pub fn from_fn(
        a1: f64,
        a2: f64,
        bound: f64,
        step: f64,
        g1: impl Fn(f64, f64) -> f64,
        g2: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let side = side_for(bound, step)?;
        let coord = |i: usize| -bound + i as f64 * step;
        let sample = |g: &dyn Fn(f64, f64) -> f64| {
            (0..side * side)
                .map(|k| g(coord(k / side), coord(k % side)))
                .collect::<Vec<_>>()
        };
        Self::new(a1, a2, bound, step, sample(&g1), sample(&g2))
    }

    /// Reads `x1,x2,g1,g2` rows covering a full square grid (any row order).
    pub fn from_csv<R: Read>(a1: f64, a2: f64, input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x1", "x2", "g1", "g2"] {
            return Err(Error::Parse(format!("expected header x1,x2,g1,g2, got {headers:?}")));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let mut vals = [0.0_f64; 4];
            for (k, v) in vals.iter_mut().enumerate() {
                *v = record[k]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {:?}", &record[k])))?;
            }
            rows.push(vals);
        }
        let bound = rows
            .iter()
            .map(|r| r[0].abs().max(r[1].abs()))
            .fold(0.0, f64::max);
        let mut xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        if xs.len() < 3 {
            return Err(Error::Parse("field file needs at least 3 distinct x1 values".into()));
        }
        let step = xs[1] - xs[0];
        let side = side_for(bound, step)?;
        if rows.len() != side * side {
            return Err(Error::Parse(format!(
                "expected {} rows for a {side}x{side} grid, got {}",
                side * side,
                rows.len()
            )));
        }
        let mut g1 = vec![f64::NAN; side * side];
        let mut g2 = vec![f64::NAN; side * side];
        for r in &rows {
            let idx = |x: f64| -> Result<usize> {
                let p = (x + bound) / step;
                if (p - p.round()).abs() > 1e-6 {
                    return Err(Error::Parse(format!("coordinate {x} is off the grid")));
                }
                Ok(p.round() as usize)
            };
            let k = idx(r[0])? * side + idx(r[1])?;
            g1[k] = r[2];
            g2[k] = r[3];
        }
        Self::new(a1, a2, bound, step, g1, g2)
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Nodes per axis.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.bound + i as f64 * self.step
    }

    /// Swaps `(g1, a1)` with `(g2, a2)` and the roles of `x1` and `x2`.
    pub fn swapped(&self) -> Self {
        let transpose = |g: &[f64]| {
            (0..self.side * self.side)
                .map(|k| g[(k % self.side) * self.side + k / self.side])
                .collect()
        };
        Self {
            a1: self.a2,
            a2: self.a1,
            g1: transpose(&self.g2),
            g2: transpose(&self.g1),
            ..self.clone()
        }
    }
}

/// `(E1, E2, slack)` at one interior node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeResidual {
    pub e1: f64,
    pub e2: f64,
    pub slack: f64,
}

struct Partials {
    value: f64,
    d1: f64,
    d2: f64,
    /// `(d1 + d2)^2 g`.
    dd: f64,
}

fn partials(g: &[f64], side: usize, h: f64, i: usize, j: usize) -> Partials {
    let at = |a: usize, b: usize| g[a * side + b];
    let c = at(i, j);
    let d11 = (at(i + 1, j) - 2.0 * c + at(i - 1, j)) / (h * h);
    let d22 = (at(i, j + 1) - 2.0 * c + at(i, j - 1)) / (h * h);
    let d12 = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * h * h);
    Partials {
        value: c,
        d1: (at(i + 1, j) - at(i - 1, j)) / (2.0 * h),
        d2: (at(i, j + 1) - at(i, j - 1)) / (2.0 * h),
        dd: d11 + 2.0 * d12 + d22,
    }
}

fn node_residual(grid: &ScaleGrid, i: usize, j: usize) -> NodeResidual {
    let (x1, x2) = (grid.coord(i), grid.coord(j));
    let (s1, s2) = (grid.a1 * grid.a1, grid.a2 * grid.a2);
    let p = partials(&grid.g1, grid.side, grid.step, i, j);
    let q = partials(&grid.g2, grid.side, grid.step, i, j);
    let e1 = -0.5 * p.dd + s1 * x1 * p.d1 + s2 * x2 * p.d2 - s1 * p.value;
    let e2 = -0.5 * q.dd + s1 * x1 * q.d1 + s2 * x2 * q.d2 - s2 * q.value;
    let cross = (p.d1 + p.d2 - q.d1 - q.d2).abs();
    NodeResidual {
        e1,
        e2,
        slack: e1 + e2 - cross,
    }
}

/// Residuals at the node `(x1, x2)`, which must be interior.
pub fn residual_at(grid: &ScaleGrid, x1: f64, x2: f64) -> Result<NodeResidual> {
    let index = |x: f64| -> Result<usize> {
        let p = (x + grid.bound) / grid.step;
        let i = p.round();
        if (p - i).abs() > 1e-6 {
            return domain(format!("{x} is not a grid coordinate"));
        }
        if i < 1.0 || i >= (grid.side - 1) as f64 {
            return domain(format!("{x} is on or outside the boundary"));
        }
        Ok(i as usize)
    };
    Ok(node_residual(grid, index(x1)?, index(x2)?))
}

/// Residual fields over the `(side - 2)^2` interior nodes, row-major in `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualFields {
    /// Interior nodes per axis.
    pub side: usize,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub slack: Vec<f64>,
}

pub fn residual_fields(grid: &ScaleGrid) -> ResidualFields {
    let inner = grid.side - 2;
    let mut out = ResidualFields {
        side: inner,
        e1: Vec::with_capacity(inner * inner),
        e2: Vec::with_capacity(inner * inner),
        slack: Vec::with_capacity(inner * inner),
    };
    for i in 1..=inner {
        for j in 1..=inner {
            let r = node_residual(grid, i, j);
            out.e1.push(r.e1);
            out.e2.push(r.e2);
            out.slack.push(r.slack);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldMin {
    pub min: f64,
    pub argmin: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiscaleReport {
    pub feasible: bool,
    pub tolerance: f64,
    pub a1: f64,
    pub a2: f64,
    pub bound: f64,
    pub step: f64,
    pub interior_points: usize,
    pub e1: FieldMin,
    pub e2: FieldMin,
    pub slack: FieldMin,
}

/// Feasible when every interior residual is at least `-tolerance`.
pub fn check_pair(grid: &ScaleGrid, tolerance: f64) -> MultiscaleReport {
    let fields = residual_fields(grid);
    let coord = |k: usize| [grid.coord(k / fields.side + 1), grid.coord(k % fields.side + 1)];
    let min_of = |v: &[f64]| {
        let (k, min) = v
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        FieldMin { min, argmin: coord(k) }
    };
    let (e1, e2, slack) = (min_of(&fields.e1), min_of(&fields.e2), min_of(&fields.slack));
    MultiscaleReport {
        feasible: [e1.min, e2.min, slack.min].iter().all(|m| *m >= -tolerance),
        tolerance,
        a1: grid.a1,
        a2: grid.a2,
        bound: grid.bound,
        step: grid.step,
        interior_points: fields.e1.len(),
        e1,
        e2,
        slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero(_: f64, _: f64) -> f64 {
        0.0
    }

    #[test]
    fn zero_pair() {
        let grid = ScaleGrid::from_fn(1.0, 2.0, 1.0, 0.05, zero, zero).unwrap();
        let f = residual_fields(&grid);
        assert!(f.e1.iter().chain(&f.e2).chain(&f.slack).all(|v| *v == 0.0));
        let report = check_pair(&grid, 1e-9);
        assert!(report.feasible);
        assert_eq!(report.interior_points, 39 * 39);
    }

    #[test]
    fn linear_g1_violates_slack() {
        let grid = ScaleGrid::from_fn(1.0, 2.0, 1.0, 0.05, |x1, _| x1, zero).unwrap();
        let r = residual_at(&grid, 0.5, -0.25).unwrap();
        assert!(r.e1.abs() < 1e-12 && r.e2 == 0.0);
        assert!((r.slack + 1.0).abs() < 1e-12);
        let report = check_pair(&grid, 1e-9);
        assert!(!report.feasible);
        assert!((report.slack.min + 1.0).abs() < 1e-9);
    }

    #[test]
    fn equal_linear_pair() {
        let (a1, a2) = (1.0, 2.0);
        let grid = ScaleGrid::from_fn(a1, a2, 1.0, 0.05, |x1, _| x1, |x1, _| x1).unwrap();
        let x1 = 0.7;
        let r = residual_at(&grid, x1, 0.1).unwrap();
        assert!(r.e1.abs() < 1e-12);
        assert!((r.e2 - (a1 * a1 - a2 * a2) * x1).abs() < 1e-12);
        assert!((r.slack - (r.e1 + r.e2)).abs() < 1e-12);
    }

    #[test]
    fn cubic_fields_match_closed_form() {
        let (a1, a2, h) = (0.5, 1.5, 0.02);
        let g1 = |x: f64, y: f64| x * x * x - 2.0 * x * y * y + 0.5 * y;
        let g2 = |x: f64, y: f64| y * y * y + x * x * y - x;
        let grid = ScaleGrid::from_fn(a1, a2, 2.0, h, g1, g2).unwrap();
        let exact = |x: f64, y: f64| {
            let (p1, p2) = (3.0 * x * x - 2.0 * y * y, -4.0 * x * y + 0.5);
            let pdd = 6.0 * x + 2.0 * (-4.0 * y) + (-4.0 * x);
            let (q1, q2) = (2.0 * x * y - 1.0, 3.0 * y * y + x * x);
            let qdd = 2.0 * y + 2.0 * (2.0 * x) + 6.0 * y;
            let (s1, s2) = (a1 * a1, a2 * a2);
            let e1 = -0.5 * pdd + s1 * x * p1 + s2 * y * p2 - s1 * g1(x, y);
            let e2 = -0.5 * qdd + s1 * x * q1 + s2 * y * q2 - s2 * g2(x, y);
            (e1, e2, e1 + e2 - (p1 + p2 - q1 - q2).abs())
        };
        for &(x, y) in &[(0.0, 0.0), (1.5, -0.4), (-1.9, 1.9), (0.62, 1.14)] {
            let r = residual_at(&grid, x, y).unwrap();
            let (e1, e2, s) = exact(x, y);
            let bound = 10.0 * h * h * 3.0 * 4.0;
            assert!((r.e1 - e1).abs() < bound, "{x},{y}: {} vs {e1}", r.e1);
            assert!((r.e2 - e2).abs() < bound);
            assert!((r.slack - s).abs() < 2.0 * bound);
        }
    }

    #[test]
    fn swap_symmetry() {
        let grid = ScaleGrid::from_fn(1.0, 3.0, 1.0, 0.05, |x, y| x * y + 0.3 * x * x, |x, y| y - x * x * y).unwrap();
        let swapped = grid.swapped();
        for &(x, y) in &[(0.1, 0.2), (-0.5, 0.75), (0.9, -0.9)] {
            let r = residual_at(&grid, x, y).unwrap();
            let s = residual_at(&swapped, y, x).unwrap();
            assert!((r.e1 - s.e2).abs() < 1e-9);
            assert!((r.e2 - s.e1).abs() < 1e-9);
            assert!((r.slack - s.slack).abs() < 1e-9);
        }
    }

    #[test]
    fn validation() {
        assert!(ScaleGrid::from_fn(1.0, 1.0, 1.0, 0.05, zero, zero).is_err());
        assert!(ScaleGrid::from_fn(1.0, 2.0, 1.0, 0.1, zero, zero).is_err());
        assert!(ScaleGrid::from_fn(-1.0, 2.0, 1.0, 0.05, zero, zero).is_err());
        assert!(ScaleGrid::from_fn(1.0, 2.0, 1.0, 0.05, |_, _| f64::NAN, zero).is_err());
        let grid = ScaleGrid::from_fn(1.0, 2.0, 1.0, 0.05, zero, zero).unwrap();
        assert!(residual_at(&grid, 1.0, 0.0).is_err());
        assert!(residual_at(&grid, 0.0, -1.0).is_err());
        assert!(residual_at(&grid, 0.01, 0.0).is_err());
    }

    #[test]
    fn csv_input() {
        let mut text = String::from("# pair\nx1,x2,g1,g2\n");
        let h = 0.05;
        for i in 0..=8 {
            for j in 0..=8 {
                let (x, y) = (-0.2 + i as f64 * h, -0.2 + j as f64 * h);
                text.push_str(&format!("{x},{y},{},{}\n", x, 0.0));
            }
        }
        let grid = ScaleGrid::from_csv(1.0, 2.0, text.as_bytes()).unwrap();
        assert_eq!(grid.side(), 9);
        assert!((grid.step() - h).abs() < 1e-12);
        let report = check_pair(&grid, 1e-9);
        assert!(!report.feasible);
        assert!(ScaleGrid::from_csv(1.0, 2.0, "x1,x2,g1\n0,0,0\n".as_bytes()).is_err());
    }

    #[test]
    fn report_json() {
        let grid = ScaleGrid::from_fn(1.0, 2.0, 0.5, 0.05, zero, zero).unwrap();
        let json = serde_json::to_value(check_pair(&grid, 1e-9)).unwrap();
        assert_eq!(json["feasible"], true);
        assert_eq!(json["slack"]["min"], 0.0);
    }
}
