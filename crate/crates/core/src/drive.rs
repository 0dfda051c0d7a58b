//! Fixed-step drivers that turn a stepper into a [`TrajectoryRecord`].
//!
//! A blow-up ends the run early: the record keeps every state computed
//! before it and carries [`RunStatus::BlewUp`]. Other errors propagate.

use std::fmt;
use std::str::FromStr;

use crate::diagnostics::{kappa, step_jerk};
use crate::error::{Error, Result};
use crate::integrators::{
    classic_lf_step, lf_init, stormer_verlet_step, LfInit, Method, Rk2Params, StepOutcome,
};
use crate::state::{init_phase_state, PhaseState, StateVector};
use crate::system::{OdeSystem, SecondOrderSystem};
use crate::trajectory::{RunStatus, TrajectoryRecord};

/// Every stepper the drivers know about, including the two that do not fit
/// the `(t, psi, phi)` interface of [`Method`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    Phi(Method),
    /// Position Verlet on a second-order system.
    StormerVerlet,
    /// Two-step explicit midpoint rule.
    ClassicLeapfrog,
}

impl Integrator {
    pub fn name(&self) -> String {
        match self {
            Integrator::Phi(m) => m.name(),
            Integrator::StormerVerlet => "sv".into(),
            Integrator::ClassicLeapfrog => "lf".into(),
        }
    }

    /// The six integrators compared in the Kepler experiments, with the
    /// three common RK2 variants listed separately.
    pub fn kepler_suite() -> Vec<Integrator> {
        vec![
            Integrator::Phi(Method::ALF),
            Integrator::Phi(Method::Dalf),
            Integrator::Phi(Method::Adalf),
            Integrator::ClassicLeapfrog,
            Integrator::Phi(Method::Rk2(Rk2Params::MIDPOINT)),
            Integrator::Phi(Method::Rk2(Rk2Params::RALSTON)),
            Integrator::Phi(Method::Rk2(Rk2Params::HEUN)),
            Integrator::StormerVerlet,
        ]
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sv" | "verlet" => Ok(Integrator::StormerVerlet),
            "lf" | "leapfrog" => Ok(Integrator::ClassicLeapfrog),
            other => other.parse().map(Integrator::Phi),
        }
    }
}

/// Jerk recorded for a step: the kick-based value when the stepper has
/// kicks, otherwise `kappa(phi_before, phi_after)`.
pub fn recorded_jerk(start: &PhaseState, outcome: &StepOutcome) -> f64 {
    step_jerk(outcome).unwrap_or_else(|| kappa(&start.phi, &outcome.state.phi))
}

fn run<F>(
    initial: PhaseState,
    initial_fevals: u64,
    h: f64,
    n_steps: usize,
    mut step: F,
) -> Result<TrajectoryRecord>
where
    F: FnMut(&PhaseState, f64) -> Result<StepOutcome>,
{
    let mut rec = TrajectoryRecord::new(initial, initial_fevals);
    for _ in 0..n_steps {
        let current = rec.last().clone();
        match step(&current, h) {
            Ok(out) => {
                let jerk = recorded_jerk(&current, &out);
                rec.push(out.state, h, jerk, out.fevals);
            }
            Err(Error::BlowUp { .. }) => {
                rec.status = RunStatus::BlewUp;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rec)
}

/// `n_steps` steps of size `h` from a given state.
pub fn drive_fixed_from(
    method: Method,
    sys: &OdeSystem,
    initial: PhaseState,
    initial_fevals: u64,
    h: f64,
    n_steps: usize,
) -> Result<TrajectoryRecord> {
    run(initial, initial_fevals, h, n_steps, |s, h| {
        method.step(sys, s, h)
    })
}

/// `n_steps` steps of size `h` from `psi0`, with `phi` initialized to the
/// field value (one evaluation).
pub fn drive_fixed(
    method: Method,
    sys: &OdeSystem,
    t0: f64,
    psi0: impl Into<StateVector>,
    h: f64,
    n_steps: usize,
) -> Result<TrajectoryRecord> {
    let initial = init_phase_state(sys, t0, psi0)?;
    drive_fixed_from(method, sys, initial, 1, h, n_steps)
}

/// Störmer-Verlet run; `psi` holds positions and `phi` velocities.
pub fn drive_verlet(
    sys: &SecondOrderSystem,
    t0: f64,
    q0: impl Into<StateVector>,
    v0: impl Into<StateVector>,
    h: f64,
    n_steps: usize,
) -> Result<TrajectoryRecord> {
    let initial = PhaseState::new(t0, q0, v0);
    run(initial, 0, h, n_steps, |s, h| {
        stormer_verlet_step(sys, s, h)
    })
}

/// Classic leapfrog run. The recorded `phi` of each state is the field
/// value that the next step consumes; the last state costs one extra
/// evaluation so that it carries a `phi` as well.
pub fn drive_leapfrog(
    sys: &OdeSystem,
    t0: f64,
    psi0: impl Into<StateVector>,
    h: f64,
    n_steps: usize,
    init: LfInit<'_>,
) -> Result<TrajectoryRecord> {
    let before = sys.evaluations();
    let mut pair = lf_init(sys, t0, psi0, t0 + h, init)?;
    let f0 = sys.eval(t0, &pair.first.psi)?;
    let first = PhaseState {
        t: t0,
        psi: pair.first.psi.clone(),
        phi: f0,
    };
    let mut rec = TrajectoryRecord::new(first, sys.evaluations() - before);
    let mut counted = sys.evaluations();
    let mut push_second =
        |rec: &mut TrajectoryRecord, pair: &crate::integrators::LeapfrogPair| -> Result<()> {
            let phi = sys.eval(pair.second.t, &pair.second.psi)?;
            let state = PhaseState {
                t: pair.second.t,
                psi: pair.second.psi.clone(),
                phi,
            };
            let jerk = kappa(&rec.last().phi, &state.phi);
            let now = sys.evaluations();
            rec.push(state, h, jerk, now - counted);
            counted = now;
            Ok(())
        };
    if n_steps == 0 {
        return Ok(rec);
    }
    let mut outcome = push_second(&mut rec, &pair);
    for _ in 1..n_steps {
        if outcome.is_err() {
            break;
        }
        outcome = classic_lf_step(sys, &pair).and_then(|next| {
            pair = next;
            push_second(&mut rec, &pair)
        });
    }
    match outcome {
        Ok(()) => Ok(rec),
        Err(Error::BlowUp { .. }) => {
            rec.status = RunStatus::BlewUp;
            Ok(rec)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{arctan_blowup_system, tanh_system};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn parse_integrators() {
        assert_eq!(
            "sv".parse::<Integrator>().unwrap(),
            Integrator::StormerVerlet
        );
        assert_eq!(
            "lf".parse::<Integrator>().unwrap(),
            Integrator::ClassicLeapfrog
        );
        assert_eq!(
            "dalf".parse::<Integrator>().unwrap(),
            Integrator::Phi(Method::Dalf)
        );
        assert!("euler".parse::<Integrator>().is_err());
    }

    #[test]
    fn tanh_run_shape_and_accuracy() {
        let sys = tanh_system();
        let rec = drive_fixed(Method::ALF, &sys, 0.0, [0.0], 0.1, 30).unwrap();
        assert_eq!(rec.steps(), 30);
        assert_eq!(rec.status, RunStatus::Completed);
        assert_relative_eq!(rec.last().t, 3.0, epsilon = 1e-13);
        // Near the attracting equilibrium psi = 1 the reflected phi mode of
        // ALF grows slowly, so the error is larger than the local order
        // alone would suggest.
        assert!((rec.last().psi[0] - 3f64.tanh()).abs() < 2e-3);
        assert!((rec.states[10].psi[0] - 1f64.tanh()).abs() < 1e-3);
        assert_eq!(rec.feval_count(), 31);
        assert_eq!(rec.feval_count(), sys.evaluations());
    }

    #[test]
    fn arctan_blow_up_truncates() {
        let sys = arctan_blowup_system();
        let rec = drive_fixed(Method::Dalf, &sys, 0.0, [0.0], 0.01, 400).unwrap();
        assert_eq!(rec.status, RunStatus::BlewUp);
        assert!(rec.steps() < 400);
        assert!(rec.states.iter().all(|s| s.is_finite()));
        // The solution escapes at pi/2; the run cannot get much further.
        assert!(rec.last().t < FRAC_PI_2 + 0.1);
    }

    #[test]
    fn verlet_fevals() {
        let sys = SecondOrderSystem::new("harmonic", 1, |_, q, out| out[0] = -q[0]);
        let rec = drive_verlet(&sys, 0.0, [1.0], [0.0], 0.01, 100).unwrap();
        assert_eq!(rec.feval_count(), 100);
        let t = rec.last().t;
        assert!((rec.last().psi[0] - t.cos()).abs() < 1e-4);
    }

    #[test]
    fn leapfrog_run() {
        let sys = tanh_system();
        let rec = drive_leapfrog(&sys, 0.0, [0.0], 0.5, 2, LfInit::Euler).unwrap();
        assert_eq!(rec.states.len(), 3);
        assert_eq!(rec.states[1].psi[0], 0.5);
        assert_eq!(rec.states[2].psi[0], 0.75);
        assert_eq!(rec.states[2].phi[0], 1.0 - 0.75 * 0.75);
        assert_eq!(rec.feval_count(), sys.evaluations());
    }

    #[test]
    fn leapfrog_blow_up() {
        let sys = arctan_blowup_system();
        let rec = drive_leapfrog(&sys, 0.0, [0.0], 0.01, 1000, LfInit::Euler).unwrap();
        assert_eq!(rec.status, RunStatus::BlewUp);
    }
}
