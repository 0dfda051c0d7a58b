use thiserror::Error;

use crate::state::{PhaseState, StateVector};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A right-hand side evaluation or an integrator update produced a
    /// non-finite component.
    #[error("non-finite value encountered at t = {t}")]
    BlowUp { t: f64 },

    #[error("argument outside the domain of {what}: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("state has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Fixed-point iteration for the trapezoidal start value did not settle.
    #[error("trapezoidal initialization did not converge in {iterations} iterations")]
    InitNonConvergence {
        iterations: usize,
        last: StateVector,
    },

    #[error("Kepler's equation did not converge for M = {mean_anomaly}, eps = {eps}")]
    KeplerNonConvergence { mean_anomaly: f64, eps: f64 },

    #[error("orbit is not bound (H = {energy} >= 0)")]
    UnboundOrbit { energy: f64 },

    /// Step control could not find an acceptable step; `last` is the most
    /// recent accepted state.
    #[error("step size underflow at t = {} (h = {h})", last.t)]
    StepUnderflow { h: f64, last: Box<PhaseState> },

    #[error("configuration error: {0}")]
    Config(String),
}
