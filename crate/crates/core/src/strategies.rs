//! Betting rules mapping the current discounted height to a bet.

use std::fmt;
use std::path::Path;

use crate::curves::PayoffCurve;
use crate::error::{domain, Error, Result};
use crate::specfun::{erfi, HermiteParams};

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyKind {
    /// `(f(rho x + 1) - f(rho x - 1)) / 2` for a tabulated payoff curve.
    CurveInduced(PayoffCurve),
    /// `c1 erfi(x / sqrt(n)) + c2`.
    Hermite { params: HermiteParams, n: u32 },
    /// `tanh(x / sqrt(n))`.
    WeightedMajority { n: u32 },
    ConstantPlus,
    ConstantMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// Clamp every bet to `[-1, 1]`.
    pub bet_bound: bool,
}

impl Strategy {
    pub fn curve_induced(curve: PayoffCurve) -> Self {
        let bet_bound = curve.bounded_bets();
        Self {
            kind: StrategyKind::CurveInduced(curve),
            bet_bound,
        }
    }

    pub fn hermite(params: HermiteParams, n: u32) -> Result<Self> {
        check_window(n)?;
        Ok(Self {
            kind: StrategyKind::Hermite { params, n },
            bet_bound: true,
        })
    }

    pub fn weighted_majority(n: u32) -> Result<Self> {
        check_window(n)?;
        Ok(Self {
            kind: StrategyKind::WeightedMajority { n },
            bet_bound: true,
        })
    }

    pub fn constant_plus() -> Self {
        Self {
            kind: StrategyKind::ConstantPlus,
            bet_bound: true,
        }
    }

    pub fn constant_minus() -> Self {
        Self {
            kind: StrategyKind::ConstantMinus,
            bet_bound: true,
        }
    }

    /// Same rule without the `[-1, 1]` clamp.
    pub fn unbounded(self) -> Self {
        Self {
            bet_bound: false,
            ..self
        }
    }

    /// Window size the rule was built for, if any.
    pub fn window(&self) -> Option<u32> {
        match &self.kind {
            StrategyKind::CurveInduced(c) => Some(c.n()),
            StrategyKind::Hermite { n, .. } | StrategyKind::WeightedMajority { n } => Some(*n),
            StrategyKind::ConstantPlus | StrategyKind::ConstantMinus => None,
        }
    }

    /// Short name used in CSV output.
    pub fn label(&self) -> &'static str {
        match self.kind {
            StrategyKind::CurveInduced(_) => "curve",
            StrategyKind::Hermite { .. } => "hermite",
            StrategyKind::WeightedMajority { .. } => "wm",
            StrategyKind::ConstantPlus => "const+",
            StrategyKind::ConstantMinus => "const-",
        }
    }

    /// Bet at discounted height `x`, which must lie in `[-n, n]`.
    pub fn bet(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return domain(format!("non-finite height {x}"));
        }
        if let Some(n) = self.window() {
            if x.abs() > f64::from(n) {
                return domain(format!("height {x} outside [-{n}, {n}]"));
            }
        }
        let raw = match &self.kind {
            StrategyKind::CurveInduced(curve) => crate::curves::induced_bet(curve, x)?,
            StrategyKind::Hermite { params, n } => {
                let y = x / f64::from(*n).sqrt();
                let e = erfi(y)?;
                if params.c1 == 0.0 {
                    params.c2
                } else {
                    params.c1 * e + params.c2
                }
            }
            StrategyKind::WeightedMajority { n } => (x / f64::from(*n).sqrt()).tanh(),
            StrategyKind::ConstantPlus => 1.0,
            StrategyKind::ConstantMinus => -1.0,
        };
        if self.bet_bound {
            Ok(raw.clamp(-1.0, 1.0))
        } else if raw.is_finite() {
            Ok(raw)
        } else {
            domain(format!("bet at height {x} overflows"))
        }
    }

    /// Parses `hermite:c1=<r>,c2=<r>`, `wm`, `curve:<path>`, `const:+` or
    /// `const:-`. `n` supplies the window for the Hermite and weighted-majority
    /// rules; curve files carry their own.
    pub fn parse(spec: &str, n: u32) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "wm" => return Self::weighted_majority(n),
            "const:+" => return Ok(Self::constant_plus()),
            "const:-" => return Ok(Self::constant_minus()),
            _ => {}
        }
        if let Some(path) = spec.strip_prefix("curve:") {
            let file = std::fs::File::open(Path::new(path))
                .map_err(|e| Error::Parse(format!("cannot open curve file {path}: {e}")))?;
            let curve = PayoffCurve::read_csv(std::io::BufReader::new(file))?;
            return Ok(Self::curve_induced(curve));
        }
        if let Some(rest) = spec.strip_prefix("hermite:") {
            let (mut c1, mut c2) = (None, None);
            for part in rest.split(',') {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {value:?}")))?;
                match key.trim() {
                    "c1" => c1 = Some(value),
                    "c2" => c2 = Some(value),
                    other => return Err(Error::Parse(format!("unknown hermite parameter {other}"))),
                }
            }
            let params = HermiteParams::new(
                c1.ok_or_else(|| Error::Parse("missing c1".into()))?,
                c2.ok_or_else(|| Error::Parse("missing c2".into()))?,
            )?;
            return Self::hermite(params, n);
        }
        Err(Error::Parse(format!(
            "unknown strategy {spec:?}; expected hermite:c1=..,c2=.. | wm | curve:<path> | const:+ | const:-"
        )))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StrategyKind::CurveInduced(c) => write!(f, "curve(n={})", c.n()),
            StrategyKind::Hermite { params, n } => {
                write!(f, "hermite:c1={},c2={} (n={n})", params.c1, params.c2)
            }
            StrategyKind::WeightedMajority { n } => write!(f, "wm (n={n})"),
            StrategyKind::ConstantPlus => f.write_str("const:+"),
            StrategyKind::ConstantMinus => f.write_str("const:-"),
        }
    }
}

fn check_window(n: u32) -> Result<()> {
    if n < 2 {
        return domain(format!("window size must be >= 2, got {n}"));
    }
    Ok(())
}
