//! Integration maps.
//!
//! The asynchronous family ([`alf_step`], [`dalf_step`], [`adalf_step`])
//! and the velocity-augmented [`rk2_step`] all act on a [`PhaseState`]
//! `(t, psi, phi)` and can be driven interchangeably through [`Method`].
//! [`stormer_verlet_step`] acts on second-order systems and the classic
//! two-step leapfrog lives in [`leapfrog`].

mod alf;
pub mod leapfrog;
mod rk2;
mod verlet;

use std::fmt;
use std::str::FromStr;

pub use alf::{
    adalf2_step, adalf_step, alf_step, dalf_step, drift, init_mechanical_state, kick,
    MechanicalState,
};
pub use leapfrog::{
    classic_lf_step, lf_init, lf_restart, reverse_pair, LeapfrogPair, LfInit, TimedState,
};
pub use rk2::{rk2_step, Rk2Params};
pub use verlet::stormer_verlet_step;

use crate::error::{Error, Result};
use crate::state::{PhaseState, StateVector};
use crate::system::OdeSystem;

/// One `phi` update inside a step: the fresh field value and the carried
/// derivative before and after the update.
#[derive(Debug, Clone, PartialEq)]
pub struct Kick {
    pub field: StateVector,
    pub phi_before: StateVector,
    pub phi_after: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: PhaseState,
    /// Kicks in execution order: one for ALF, two for DALF/ADALF, none for RK2.
    pub kicks: Vec<Kick>,
    pub fevals: u64,
}

impl StepOutcome {
    /// The `phi` values produced by the sub-steps.
    pub fn substep_phis(&self) -> impl Iterator<Item = &StateVector> {
        self.kicks.iter().map(|k| &k.phi_after)
    }
}

/// Steppers that carry `phi` and can be used by the fixed-step and
/// adaptive drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Asynchronous leapfrog with relaxation `lambda` (1 is plain ALF).
    Alf {
        lambda: f64,
    },
    Dalf,
    Adalf,
    Rk2(Rk2Params),
}

impl Method {
    pub const ALF: Method = Method::Alf { lambda: 1.0 };

    pub fn step(&self, sys: &OdeSystem, s: &PhaseState, h: f64) -> Result<StepOutcome> {
        match *self {
            Method::Alf { lambda } => alf_step(sys, s, h, lambda),
            Method::Dalf => dalf_step(sys, s, h),
            Method::Adalf => adalf_step(sys, s, h),
            Method::Rk2(p) => rk2_step(sys, s, h, p),
        }
    }

    /// Right-hand side evaluations per step.
    pub fn fevals_per_step(&self) -> u64 {
        match self {
            Method::Alf { .. } => 1,
            _ => 2,
        }
    }

    pub fn is_leapfrog_family(&self) -> bool {
        !matches!(self, Method::Rk2(_))
    }

    pub fn name(&self) -> String {
        match *self {
            Method::Alf { lambda: 1.0 } => "alf".into(),
            Method::Alf { lambda } => format!("alf(lambda={lambda})"),
            Method::Dalf => "dalf".into(),
            Method::Adalf => "adalf".into(),
            Method::Rk2(p) => match p.a1() {
                0.0 => "rk2-midpoint".into(),
                0.5 => "rk2-heun".into(),
                a if (a - 1.0 / 3.0).abs() < 1e-15 => "rk2-ralston".into(),
                a => format!("rk2(a1={a})"),
            },
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Parses the plain names `alf`, `dalf`, `adalf`, `rk2` (midpoint),
    /// `midpoint`, `ralston`, `heun`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alf" => Ok(Method::ALF),
            "dalf" => Ok(Method::Dalf),
            "adalf" => Ok(Method::Adalf),
            "rk2" | "midpoint" | "rk2-midpoint" => Ok(Method::Rk2(Rk2Params::MIDPOINT)),
            "ralston" | "rk2-ralston" => Ok(Method::Rk2(Rk2Params::RALSTON)),
            "heun" | "rk2-heun" => Ok(Method::Rk2(Rk2Params::HEUN)),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

pub(crate) fn check_step(h: f64) -> Result<()> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h,
            reason: "step size must be finite and non-zero",
        });
    }
    Ok(())
}

pub(crate) fn check_state(sys_dim: usize, s: &PhaseState) -> Result<()> {
    if s.psi.len() != sys_dim || s.phi.len() != sys_dim {
        return Err(Error::Dimension {
            expected: sys_dim,
            found: if s.psi.len() != sys_dim {
                s.psi.len()
            } else {
                s.phi.len()
            },
        });
    }
    Ok(())
}

pub(crate) fn finite_or_blow_up(s: PhaseState) -> Result<PhaseState> {
    if s.is_finite() {
        Ok(s)
    } else {
        Err(Error::BlowUp { t: s.t })
    }
}
