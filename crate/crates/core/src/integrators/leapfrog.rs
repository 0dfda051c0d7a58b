//! Classic two-step leapfrog (explicit midpoint rule) on pairs of states.

use crate::error::{Error, Result};
use crate::state::StateVector;
use crate::system::OdeSystem;

#[derive(Debug, Clone, PartialEq)]
pub struct TimedState {
    pub t: f64,
    pub psi: StateVector,
}

impl TimedState {
    pub fn new(t: f64, psi: impl Into<StateVector>) -> Self {
        TimedState { t, psi: psi.into() }
    }
}

/// The leapfrog state: two consecutive points of a synchronous trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct LeapfrogPair {
    pub first: TimedState,
    pub second: TimedState,
}

impl LeapfrogPair {
    pub fn new(first: TimedState, second: TimedState) -> Result<Self> {
        if first.t == second.t {
            return Err(Error::InvalidParameter {
                name: "t1",
                value: second.t,
                reason: "the two times of a leapfrog pair must differ",
            });
        }
        if first.psi.len() != second.psi.len() {
            return Err(Error::Dimension {
                expected: first.psi.len(),
                found: second.psi.len(),
            });
        }
        Ok(LeapfrogPair { first, second })
    }
}

/// How the second point of the starting pair is produced.
pub enum LfInit<'a> {
    /// `psi1 = psi0 + (t1 - t0) F(t0, psi0)`
    Euler,
    /// Trapezoidal rule solved by fixed-point iteration from `psi1 = psi0`.
    Trapezoidal { tol: f64, max_iter: usize },
    /// `psi1` taken from a reference solution.
    Exact(&'a dyn Fn(f64) -> StateVector),
}

/// `((t0, psi0), (t1, psi1)) -> ((t1, psi1), (2 t1 - t0, psi0 + (t2 - t0) F(t1, psi1)))`
pub fn classic_lf_step(sys: &OdeSystem, pair: &LeapfrogPair) -> Result<LeapfrogPair> {
    let LeapfrogPair { first, second } = pair;
    let t2 = 2.0 * second.t - first.t;
    let slope = sys.eval(second.t, &second.psi)?;
    let psi2 = first.psi.scaled_sum(t2 - first.t, &slope);
    if !psi2.is_finite() {
        return Err(Error::BlowUp { t: t2 });
    }
    Ok(LeapfrogPair {
        first: second.clone(),
        second: TimedState { t: t2, psi: psi2 },
    })
}

pub fn lf_init(
    sys: &OdeSystem,
    t0: f64,
    psi0: impl Into<StateVector>,
    t1: f64,
    mode: LfInit<'_>,
) -> Result<LeapfrogPair> {
    let psi0 = psi0.into();
    if t1 == t0 {
        return Err(Error::InvalidParameter {
            name: "t1",
            value: t1,
            reason: "the two times of a leapfrog pair must differ",
        });
    }
    let dt = t1 - t0;
    let psi1 = match mode {
        LfInit::Euler => {
            let f0 = sys.eval(t0, &psi0)?;
            psi0.scaled_sum(dt, &f0)
        }
        LfInit::Trapezoidal { tol, max_iter } => {
            let f0 = sys.eval(t0, &psi0)?;
            let mut current = psi0.clone();
            let mut converged = false;
            for _ in 0..max_iter {
                let f1 = sys.eval(t1, &current)?;
                let mut next = psi0.clone();
                for ((y, a), b) in next.iter_mut().zip(f0.iter()).zip(f1.iter()) {
                    *y += dt * 0.5 * (a + b);
                }
                let change = next.distance(&current);
                current = next;
                if change < tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::InitNonConvergence {
                    iterations: max_iter,
                    last: current,
                });
            }
            current
        }
        LfInit::Exact(oracle) => oracle(t1),
    };
    LeapfrogPair::new(TimedState::new(t0, psi0), TimedState::new(t1, psi1))
}

/// Starts a fresh pair with step `new_tau` from the later point of `pair`,
/// using an Euler step. The earlier point is discarded.
pub fn lf_restart(pair: &LeapfrogPair, sys: &OdeSystem, new_tau: f64) -> Result<LeapfrogPair> {
    let p = &pair.second;
    lf_init(sys, p.t, p.psi.clone(), p.t + new_tau, LfInit::Euler)
}

/// Motion reversal: swaps the two points.
pub fn reverse_pair(pair: &LeapfrogPair) -> LeapfrogPair {
    LeapfrogPair {
        first: pair.second.clone(),
        second: pair.first.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::tanh_system;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pair(t0: f64, a: f64, t1: f64, b: f64) -> LeapfrogPair {
        LeapfrogPair::new(TimedState::new(t0, [a]), TimedState::new(t1, [b])).unwrap()
    }

    #[test]
    fn zero_field_step() {
        let sys = OdeSystem::new("zero", 1, |_, _, out| out.fill(0.0));
        let p = pair(0.0, 3.0, 0.25, 3.0);
        let next = classic_lf_step(&sys, &p).unwrap();
        assert_eq!(next, pair(0.25, 3.0, 0.5, 3.0));
    }

    #[test]
    fn tanh_step() {
        let sys = tanh_system();
        let next = classic_lf_step(&sys, &pair(0.0, 0.0, 0.5, 0.5)).unwrap();
        assert_eq!(next.second.t, 1.0);
        assert_eq!(next.second.psi[0], 0.75);
    }

    #[test]
    fn euler_init() {
        let p = lf_init(&tanh_system(), 0.0, [0.0], 0.5, LfInit::Euler).unwrap();
        assert_eq!(p.second.psi[0], 0.5);
    }

    #[test]
    fn trapezoidal_init_hits_closed_form_root() {
        let mode = LfInit::Trapezoidal {
            tol: 1e-12,
            max_iter: 100,
        };
        let p = lf_init(&tanh_system(), 0.0, [0.0], 0.5, mode).unwrap();
        assert_relative_eq!(p.second.psi[0], 6f64.sqrt() - 2.0, epsilon = 1e-11);
    }

    #[test]
    fn trapezoidal_init_reports_non_convergence() {
        let mode = LfInit::Trapezoidal {
            tol: 1e-14,
            max_iter: 3,
        };
        match lf_init(&tanh_system(), 0.0, [0.0], 0.5, mode) {
            Err(Error::InitNonConvergence { iterations, last }) => {
                assert_eq!(iterations, 3);
                assert!((last[0] - (6f64.sqrt() - 2.0)).abs() < 1e-2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn exact_init() {
        let oracle = |t: f64| StateVector::from([t.tanh()]);
        let p = lf_init(&tanh_system(), 0.0, [0.0], 0.5, LfInit::Exact(&oracle)).unwrap();
        assert_relative_eq!(p.second.psi[0], 0.462117157, epsilon = 1e-9);
    }

    #[test]
    fn init_rejects_equal_times() {
        assert!(lf_init(&tanh_system(), 1.0, [0.0], 1.0, LfInit::Euler).is_err());
    }

    #[test]
    fn restart() {
        let sys = OdeSystem::new("zero", 1, |_, _, out| out.fill(0.0));
        let p = pair(-1.0, 2.0, 0.5, 7.0);
        assert_eq!(lf_restart(&p, &sys, 0.1).unwrap(), pair(0.5, 7.0, 0.6, 7.0));

        let p = pair(-0.5, -0.4, 0.0, 0.0);
        assert_eq!(
            lf_restart(&p, &tanh_system(), 0.25).unwrap(),
            pair(0.0, 0.0, 0.25, 0.25)
        );
    }

    #[test]
    fn restart_then_step_matches_fresh_start() {
        let sys = tanh_system();
        let old = pair(-0.3, -0.29, 0.2, 0.197);
        let restarted = classic_lf_step(&sys, &lf_restart(&old, &sys, 0.1).unwrap()).unwrap();
        let fresh = classic_lf_step(
            &sys,
            &lf_init(&sys, 0.2, [0.197], 0.2 + 0.1, LfInit::Euler).unwrap(),
        )
        .unwrap();
        assert_eq!(restarted, fresh);
    }

    #[test]
    fn reversal() {
        let p = pair(0.0, 1.5, 1.0, -2.5);
        assert_eq!(reverse_pair(&p), pair(1.0, -2.5, 0.0, 1.5));
        assert_eq!(reverse_pair(&reverse_pair(&p)), p);
    }

    #[test]
    fn reversed_run_reconstructs_history() {
        let sys = tanh_system();
        let mut p = lf_init(&sys, 0.0, [0.0], 0.1, LfInit::Euler).unwrap();
        let start = p.clone();
        for _ in 0..10 {
            p = classic_lf_step(&sys, &p).unwrap();
        }
        let mut back = reverse_pair(&p);
        for _ in 0..10 {
            back = classic_lf_step(&sys, &back).unwrap();
        }
        let back = reverse_pair(&back);
        assert!((back.first.psi[0] - start.first.psi[0]).abs() < 1e-14);
        assert!((back.second.psi[0] - start.second.psi[0]).abs() < 1e-14);
        assert!((back.first.t - start.first.t).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn step_reverse_step_is_reversal(
            t0 in -2.0f64..2.0,
            dt in 0.01f64..0.5,
            a in -0.9f64..0.9,
            b in -0.9f64..0.9,
        ) {
            let sys = tanh_system();
            let p = pair(t0, a, t0 + dt, b);
            let lhs = classic_lf_step(&sys, &reverse_pair(&classic_lf_step(&sys, &p).unwrap())).unwrap();
            let rhs = reverse_pair(&p);
            for (x, y) in [(lhs.first.psi[0], rhs.first.psi[0]), (lhs.second.psi[0], rhs.second.psi[0]),
                           (lhs.first.t, rhs.first.t), (lhs.second.t, rhs.second.t)] {
                prop_assert!((x - y).abs() <= 1e-13 * (1.0 + y.abs()));
            }
        }
    }
}
