//! Automatic step-size control driven by the jerk `kappa(phi_before, phi_after)`.
//!
//! A step whose jerk exceeds `kink_crit` is rejected: `phi` is reset to the
//! field value and the step is retried with `h * (1 - frac)`. A step with
//! jerk below `kink_crit / 2` lets the next step grow by `1 + frac`.

use crate::diagnostics::kappa;
use crate::drive::Integrator;
use crate::error::{Error, Result};
use crate::integrators::Method;
use crate::state::PhaseState;
use crate::system::OdeSystem;
use crate::trajectory::{RunStatus, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControlConfig {
    pub kink_crit: f64,
    pub frac: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub retry_cap: u32,
}

impl StepControlConfig {
    pub const DEFAULT_KINK_CRIT: f64 = 1e-3;
    pub const DEFAULT_FRAC: f64 = 0.2;
    pub const DEFAULT_RETRY_CAP: u32 = 60;

    pub fn new(kink_crit: f64, frac: f64, h_init: f64, h_min: f64, h_max: f64) -> Result<Self> {
        let cfg = StepControlConfig {
            kink_crit,
            frac,
            h_init,
            h_min,
            h_max,
            retry_cap: Self::DEFAULT_RETRY_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults for integrating over `[t0, t_end]`: `h_min = 1e-12 span`,
    /// `h_init = 1e-3 span`, `h_max = span / 8`.
    pub fn for_interval(t0: f64, t_end: f64, kink_crit: f64, frac: f64) -> Result<Self> {
        let span = t_end - t0;
        if !(span > 0.0 && span.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                value: t_end,
                reason: "must lie after the start time",
            });
        }
        Self::new(kink_crit, frac, 1e-3 * span, 1e-12 * span, span / 8.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, reason| {
            Err(Error::InvalidParameter {
                name,
                value,
                reason,
            })
        };
        if !(self.kink_crit > 0.0 && self.kink_crit.is_finite()) {
            return bad("kink_crit", self.kink_crit, "must be positive");
        }
        if !(self.frac > 0.0 && self.frac < 1.0) {
            return bad("frac", self.frac, "must lie in (0, 1)");
        }
        if !(self.h_min > 0.0
            && self.h_min < self.h_init
            && self.h_init < self.h_max
            && self.h_max.is_finite())
        {
            return bad("h_init", self.h_init, "need 0 < h_min < h_init < h_max");
        }
        Ok(())
    }

    /// Rejection threshold `a1`.
    pub fn a1(&self) -> f64 {
        self.kink_crit
    }

    /// Growth threshold `a2 = a1 / 2`.
    pub fn a2(&self) -> f64 {
        0.5 * self.kink_crit
    }

    /// Shrink factor `f1 = 1 - frac`.
    pub fn f1(&self) -> f64 {
        1.0 - self.frac
    }

    /// Growth factor `f2 = 1 + frac`.
    pub fn f2(&self) -> f64 {
        1.0 + self.frac
    }
}

/// Result of one controlled step.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoStep {
    pub state: PhaseState,
    /// Step size that was accepted.
    pub h: f64,
    /// Proposal for the following step.
    pub next_h: f64,
    /// Jerk of the accepted step.
    pub kappa: f64,
    pub retries: u32,
    /// Evaluations spent, including rejected trials and `phi` resets.
    pub fevals: u64,
}

/// One accepted step starting from `s` with trial size `h`.
pub fn auto_step(
    method: Method,
    sys: &OdeSystem,
    s: &PhaseState,
    h: f64,
    cfg: &StepControlConfig,
) -> Result<AutoStep> {
    let mut current = s.clone();
    let mut h = h.min(cfg.h_max);
    let mut retries = 0;
    let mut fevals = 0;
    loop {
        if h < cfg.h_min || retries > cfg.retry_cap {
            return Err(Error::StepUnderflow {
                h,
                last: Box::new(s.clone()),
            });
        }
        let out = method.step(sys, &current, h)?;
        fevals += out.fevals;
        let k = kappa(&current.phi, &out.state.phi);
        if k > cfg.a1() {
            current.phi = sys.eval(current.t, &current.psi)?;
            fevals += 1;
            h *= cfg.f1();
            retries += 1;
            continue;
        }
        let next_h = if k < cfg.a2() {
            (h * cfg.f2()).min(cfg.h_max)
        } else {
            h
        };
        return Ok(AutoStep {
            state: out.state,
            h,
            next_h,
            kappa: k,
            retries,
            fevals,
        });
    }
}

/// Controlled run from `initial` to exactly `t_end`.
///
/// The record's `jerk_values` hold the accepted jerks. Its evaluation
/// counts start from zero at `initial`. Blow-up and step underflow end the
/// run with the corresponding status; other errors propagate.
pub fn drive_adaptive(
    method: Method,
    sys: &OdeSystem,
    initial: PhaseState,
    t_end: f64,
    cfg: &StepControlConfig,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    if !(t_end > initial.t) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            reason: "must lie after the start time",
        });
    }
    let mut rec = TrajectoryRecord::new(initial, 0);
    let mut h = cfg.h_init;
    loop {
        let current = rec.last();
        let remaining = t_end - current.t;
        // Absorb a remainder shorter than h_min into the final step.
        let last_step = current.t + h >= t_end - cfg.h_min;
        let trial = if last_step { remaining } else { h };
        let relaxed;
        let cfg_now = if last_step && trial < cfg.h_min {
            relaxed = StepControlConfig {
                h_min: 0.5 * trial,
                ..*cfg
            };
            &relaxed
        } else {
            cfg
        };
        match auto_step(method, sys, current, trial, cfg_now) {
            Ok(step) => {
                let mut state = step.state;
                let landed = step.h == trial && last_step;
                if landed {
                    state.t = t_end;
                }
                rec.push(state, step.h, step.kappa, step.fevals);
                if landed {
                    return Ok(rec);
                }
                // A shortened final step leaves the schedule as it was.
                h = if last_step {
                    h.min(step.next_h)
                } else {
                    step.next_h
                };
            }
            Err(Error::BlowUp { .. }) => {
                rec.status = RunStatus::BlewUp;
                return Ok(rec);
            }
            Err(Error::StepUnderflow { .. }) => {
                rec.status = RunStatus::StepUnderflow;
                return Ok(rec);
            }
            Err(e) => return Err(e),
        }
    }
}

/// [`drive_adaptive`] for an [`Integrator`]; Störmer-Verlet and the classic
/// two-step leapfrog carry no `phi` to test and are rejected.
pub fn drive_adaptive_integrator(
    integrator: Integrator,
    sys: &OdeSystem,
    initial: PhaseState,
    t_end: f64,
    cfg: &StepControlConfig,
) -> Result<TrajectoryRecord> {
    match integrator {
        Integrator::Phi(m) => drive_adaptive(m, sys, initial, t_end, cfg),
        other => Err(Error::Config(format!(
            "step control needs a phi-carrying method, got '{other}'"
        ))),
    }
}
