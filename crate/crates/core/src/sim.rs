//! The discounted prediction game: traces, exhaustive and greedy adversaries,
//! and empirical payoff envelopes.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curves::format_grid_step;
use crate::error::{domain, Error, Result};
use crate::strategies::Strategy;

pub const MAX_EXHAUSTIVE_HORIZON: u32 = 22;
pub const MAX_GREEDY_HORIZON: usize = 1_000_000;

/// Running state after `t` rounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GameState {
    pub t: usize,
    /// Discounted height, `h <- rho h + b`.
    pub h: f64,
    /// Discounted payoff, `a <- rho a + b bet`.
    pub a: f64,
    /// Undiscounted payoff.
    pub a_raw: f64,
}

impl GameState {
    pub fn advance(&self, bit: i8, bet: f64, rho: f64) -> Self {
        let b = f64::from(bit);
        Self {
            t: self.t + 1,
            h: rho * self.h + b,
            a: rho * self.a + b * bet,
            a_raw: self.a_raw + b * bet,
        }
    }

    /// `|h| - a`.
    pub fn regret(&self) -> f64 {
        self.h.abs() - self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStep {
    pub t: usize,
    pub bit: i8,
    /// Bet placed before `bit` was revealed.
    pub bet: f64,
    pub h: f64,
    pub a: f64,
    pub a_raw: f64,
    /// `|h| - a` after this step.
    pub regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameTrace {
    pub rho: f64,
    pub steps: Vec<TraceStep>,
    pub seed: Option<u64>,
}

impl GameTrace {
    pub fn final_state(&self) -> GameState {
        self.steps.last().map_or_else(GameState::default, |s| GameState {
            t: s.t,
            h: s.h,
            a: s.a,
            a_raw: s.a_raw,
        })
    }

    /// Largest `|h| - a` over all steps (0 for an empty trace).
    pub fn max_regret(&self) -> f64 {
        self.steps.iter().map(|s| s.regret).fold(0.0, f64::max)
    }

    pub fn bits(&self) -> Vec<i8> {
        self.steps.iter().map(|s| s.bit).collect()
    }

    /// CSV `t,bit,bet,h,a,a_raw,regret`.
    pub fn write_csv<W: Write>(&self, mut out: W, meta: &[String]) -> Result<()> {
        for line in meta {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "bit", "bet", "h", "a", "a_raw", "regret"])?;
        for s in &self.steps {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 1.0) {
        return domain(format!("rho must be in (0, 1], got {rho}"));
    }
    Ok(())
}

/// Plays `bits` against `s`; each bet is computed from the height before the
/// bit is revealed.
pub fn run(s: &Strategy, bits: &[i8], rho: f64) -> Result<GameTrace> {
    check_rho(rho)?;
    let mut state = GameState::default();
    let mut steps = Vec::with_capacity(bits.len());
    for &bit in bits {
        if bit != 1 && bit != -1 {
            return domain(format!("bits must be +-1, got {bit}"));
        }
        let bet = s.bet(state.h)?;
        state = state.advance(bit, bet, rho);
        steps.push(TraceStep {
            t: state.t,
            bit,
            bet,
            h: state.h,
            a: state.a,
            a_raw: state.a_raw,
            regret: state.regret(),
        });
    }
    Ok(GameTrace {
        rho,
        steps,
        seed: None,
    })
}

fn check_exhaustive(horizon: u32) -> Result<()> {
    if horizon > MAX_EXHAUSTIVE_HORIZON {
        return Err(Error::Resource(format!(
            "2^{horizon} sequences exceed the exhaustive limit 2^{MAX_EXHAUSTIVE_HORIZON}"
        )));
    }
    Ok(())
}

type Visit<'a> = dyn FnMut(&GameState, &[i8], bool) -> Result<()> + 'a;

/// Depth-first walk over all `2^T` sequences, calling `visit` on every
/// reached state (including intermediate ones) with the current prefix.
fn walk_tree(
    s: &Strategy,
    rho: f64,
    depth: u32,
    state: GameState,
    prefix: &mut Vec<i8>,
    visit: &mut Visit<'_>,
) -> Result<()> {
    if depth == 0 {
        return Ok(());
    }
    let bet = s.bet(state.h)?;
    for bit in [1i8, -1] {
        let next = state.advance(bit, bet, rho);
        prefix.push(bit);
        visit(&next, prefix, depth == 1)?;
        walk_tree(s, rho, depth - 1, next, prefix, visit)?;
        prefix.pop();
    }
    Ok(())
}

/// Largest final-step regret `|h_T| - a_T` over all `2^T` sequences, with a
/// maximizing sequence.
pub fn exhaustive_worst_regret(s: &Strategy, rho: f64, horizon: u32) -> Result<(f64, Vec<i8>)> {
    check_exhaustive(horizon)?;
    check_rho(rho)?;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    if horizon == 0 {
        return Ok((0.0, Vec::new()));
    }
    walk_tree(s, rho, horizon, GameState::default(), &mut Vec::new(), &mut |st, prefix, leaf| {
        if leaf && st.regret() > best.0 {
            best = (st.regret(), prefix.to_vec());
        }
        Ok(())
    })?;
    Ok(best)
}

/// Worst slack of the guarantee `a_t >= f(h_t)` over every step of every
/// sequence of length `T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuaranteeCheck {
    /// `min (a_t - f(h_t))` over all visited states, including the start.
    pub min_slack: f64,
    pub witness: Vec<i8>,
    pub sequences: u64,
    pub states_checked: u64,
}

impl GuaranteeCheck {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.min_slack >= -tolerance
    }
}

pub fn exhaustive_guarantee(
    s: &Strategy,
    f: impl Fn(f64) -> Result<f64>,
    rho: f64,
    horizon: u32,
) -> Result<GuaranteeCheck> {
    check_exhaustive(horizon)?;
    check_rho(rho)?;
    let mut check = GuaranteeCheck {
        min_slack: -f(0.0)?,
        witness: Vec::new(),
        sequences: 1u64 << horizon,
        states_checked: 1,
    };
    walk_tree(s, rho, horizon, GameState::default(), &mut Vec::new(), &mut |st, prefix, _| {
        let slack = st.a - f(st.h)?;
        check.states_checked += 1;
        if slack < check.min_slack {
            check.min_slack = slack;
            check.witness = prefix.to_vec();
        }
        Ok(())
    })?;
    Ok(check)
}

/// Final regret after playing `first` and then the best continuation of
/// `depth` more bits.
fn lookahead_value(s: &Strategy, rho: f64, state: GameState, depth: u32) -> Result<f64> {
    if depth == 0 {
        return Ok(state.regret());
    }
    let bet = s.bet(state.h)?;
    let up = lookahead_value(s, rho, state.advance(1, bet, rho), depth - 1)?;
    let down = lookahead_value(s, rho, state.advance(-1, bet, rho), depth - 1)?;
    Ok(up.max(down))
}

/// Adversary that, at each step, plays the bit whose best `lookahead`-step
/// continuation ends with the largest regret (ties go to +1). Returns the
/// running maximum of `|h| - a` and the full trace.
pub fn greedy_adversary(s: &Strategy, rho: f64, horizon: usize, lookahead: u32) -> Result<(f64, GameTrace)> {
    check_rho(rho)?;
    if !(1..=3).contains(&lookahead) {
        return domain(format!("lookahead must be 1, 2 or 3, got {lookahead}"));
    }
    if horizon > MAX_GREEDY_HORIZON {
        return Err(Error::Resource(format!(
            "horizon {horizon} exceeds {MAX_GREEDY_HORIZON}"
        )));
    }
    let mut state = GameState::default();
    let mut steps = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let bet = s.bet(state.h)?;
        let up = state.advance(1, bet, rho);
        let down = state.advance(-1, bet, rho);
        let v_up = lookahead_value(s, rho, up, lookahead - 1)?;
        let v_down = lookahead_value(s, rho, down, lookahead - 1)?;
        let (bit, next) = if v_up >= v_down { (1, up) } else { (-1, down) };
        state = next;
        steps.push(TraceStep {
            t: state.t,
            bit,
            bet,
            h: state.h,
            a: state.a,
            a_raw: state.a_raw,
            regret: state.regret(),
        });
    }
    let trace = GameTrace {
        rho,
        steps,
        seed: None,
    };
    Ok((trace.max_regret(), trace))
}

/// Lower envelope of visited `(h, a)` pairs bucketed onto a uniform grid over
/// `[-half_width, half_width]`. Unvisited buckets stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCurve {
    pub n: u32,
    pub grid_step: f64,
    pub half_width: f64,
    pub values: Vec<Option<f64>>,
    pub seed: Option<u64>,
    pub instrument: String,
}

impl EmpiricalCurve {
    fn empty(n: u32, grid_step: f64, half_width: f64, seed: Option<u64>, instrument: &str) -> Self {
        let cells = (half_width / grid_step).round() as usize;
        Self {
            n,
            grid_step,
            half_width,
            values: vec![None; 2 * cells + 1],
            seed,
            instrument: instrument.to_string(),
        }
    }

    pub fn x_at(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.grid_step
    }

    fn bucket(&self, h: f64) -> Option<usize> {
        let i = ((h + self.half_width) / self.grid_step).round();
        (i >= 0.0 && (i as usize) < self.values.len()).then_some(i as usize)
    }

    fn record(&mut self, h: f64, a: f64) {
        if let Some(i) = self.bucket(h) {
            let slot = &mut self.values[i];
            *slot = Some(slot.map_or(a, |v| v.min(a)));
        }
    }

    /// `(x, f)` for visited buckets.
    pub fn visited(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|f| (self.x_at(i), f)))
    }

    pub fn visited_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// `max (|x| - f)` over visited buckets.
    pub fn regret(&self) -> f64 {
        self.visited().map(|(x, f)| x.abs() - f).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Curve file layout; unvisited buckets are written with an empty `f`.
    pub fn write_csv<W: Write>(&self, mut out: W, extra_meta: &[String]) -> Result<()> {
        writeln!(
            out,
            "# n={} grid_step={} bounded=1",
            self.n,
            format_grid_step(self.grid_step)
        )?;
        writeln!(out, "# instrument={}", self.instrument)?;
        if let Some(seed) = self.seed {
            writeln!(out, "# seed={seed}")?;
        }
        for line in extra_meta {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "f"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([self.x_at(i).to_string(), v.map(|f| f.to_string()).unwrap_or_default()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lower envelope of `(h, a)` over one greedy-adversary run (lookahead 2) and
/// `probes` uniformly random runs, each of length `horizon`. Buckets are the
/// nodes of the grid with spacing `grid_step` on `[-n, n]`.
pub fn empirical_payoff_curve(
    s: &Strategy,
    rho: f64,
    horizon: usize,
    probes: usize,
    seed: u64,
    grid_step: f64,
) -> Result<EmpiricalCurve> {
    check_rho(rho)?;
    if probes == 0 {
        return domain("probes must be >= 1");
    }
    crate::curves::dyadic_exponent(grid_step)?;
    let n = s
        .window()
        .unwrap_or_else(|| (1.0 / (1.0 - rho)).round().min(f64::from(u32::MAX)) as u32);
    let mut env = EmpiricalCurve::empty(n, grid_step, f64::from(n), Some(seed), "greedy-lookahead-2+random-probes");
    env.record(0.0, 0.0);
    let (_, trace) = greedy_adversary(s, rho, horizon, 2)?;
    for st in &trace.steps {
        env.record(st.h, st.a);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..probes {
        let mut state = GameState::default();
        for _ in 0..horizon {
            let bet = s.bet(state.h)?;
            let bit = if rng.gen::<bool>() { 1 } else { -1 };
            state = state.advance(bit, bet, rho);
            env.record(state.h, state.a);
        }
    }
    Ok(env)
}

/// Steady-state lower envelope of discounted payoffs for a stationary
/// strategy: the fixed point of
/// `m(x) = min_b rho m((x - b)/rho) + b bet((x - b)/rho)` on a grid with linear
/// interpolation. The map is a `rho`-contraction, so the fixed point is the
/// worst payoff over arbitrarily long histories and does not depend on the
/// starting guess.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyEnvelope {
    pub n: u32,
    pub grid_step: f64,
    pub values: Vec<f64>,
    /// `max (|x| - m(x))` over the grid.
    pub worst_regret: f64,
    pub argmax_x: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SteadyEnvelope {
    pub fn x_at(&self, i: usize) -> f64 {
        -f64::from(self.n) + i as f64 * self.grid_step
    }

    /// The envelope as a payoff curve on `[-n, n]`.
    pub fn to_curve(&self, bounded_bets: bool) -> Result<crate::curves::PayoffCurve> {
        crate::curves::PayoffCurve::new(self.n, self.grid_step, self.values.clone(), bounded_bets)
    }
}

pub fn steady_state_envelope(
    s: &Strategy,
    grid_step: f64,
    tolerance: f64,
    max_iterations: usize,
) -> Result<SteadyEnvelope> {
    let n = s
        .window()
        .ok_or_else(|| Error::Domain("envelope needs a strategy with a window size".into()))?;
    crate::curves::dyadic_exponent(grid_step)?;
    let nf = f64::from(n);
    let rho = 1.0 - 1.0 / nf;
    let cells = (nf / grid_step).round() as usize;
    let len = 2 * cells + 1;
    let x_at = |i: usize| -nf + i as f64 * grid_step;

    // (left node, weight, b * bet) of each predecessor (x - b) / rho
    let mut links: Vec<Vec<(usize, f64, f64)>> = Vec::with_capacity(len);
    for i in 0..len {
        let mut node = Vec::with_capacity(2);
        for b in [1.0, -1.0] {
            let pre = (x_at(i) - b) / rho;
            if pre.abs() > nf {
                continue;
            }
            let pos = ((pre + nf) / grid_step).clamp(0.0, (len - 1) as f64);
            let j = (pos.floor() as usize).min(len - 2);
            node.push((j, pos - j as f64, b * s.bet(pre)?));
        }
        links.push(node);
    }

    let mut m = vec![0.0; len];
    let mut next = vec![0.0; len];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let mut change: f64 = 0.0;
        for (i, node) in links.iter().enumerate() {
            next[i] = node
                .iter()
                .map(|&(j, w, gain)| rho * (m[j] + w * (m[j + 1] - m[j])) + gain)
                .fold(f64::INFINITY, f64::min);
            change = change.max((next[i] - m[i]).abs());
        }
        std::mem::swap(&mut m, &mut next);
        if change <= tolerance {
            converged = true;
            break;
        }
    }
    let (worst_regret, argmax_x) = m
        .iter()
        .enumerate()
        .map(|(i, f)| (x_at(i).abs() - f, x_at(i)))
        .fold((f64::NEG_INFINITY, 0.0), |acc, r| if r.0 > acc.0 { r } else { acc });
    Ok(SteadyEnvelope {
        n,
        grid_step,
        values: m,
        worst_regret,
        argmax_x,
        iterations,
        converged,
    })
}

/// Uniformly random `+-1` bits from a seeded generator.
pub fn random_bits(len: usize, seed: u64) -> Vec<i8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}
