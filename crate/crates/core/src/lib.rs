//! Optimal regret strategies for predicting binary sequences under
//! time-discounted payoffs.
//!
//! The crate covers the imaginary error function and the Hermite payoff family
//! ([`specfun`]), feasibility of tabulated payoff curves ([`curves`]), betting
//! rules ([`strategies`]), exact fixed-horizon dynamic programming ([`dp`]),
//! a game engine with adversaries ([`sim`]), two-expert trade-offs
//! ([`tradeoff`]), a two-scale residual checker ([`multiscale`]) and the
//! command-line front end ([`cli`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curves;
pub mod dp;
pub mod error;
pub mod multiscale;
pub mod sim;
pub mod specfun;
pub mod strategies;
pub mod tradeoff;

pub use curves::{check_feasible, FeasibilityReport, PayoffCurve};
pub use error::{Error, Result};
pub use specfun::{erfi, hermite_payoff, HermiteParams};
pub use strategies::Strategy;
