//! Asynchronous leapfrog integrators and the tools to evaluate them.
//!
//! The state of an asynchronous leapfrog run is `(t, psi, phi)`, where `phi`
//! is a carried estimate of `psi'`. One ALF step drifts `psi` by half a step,
//! evaluates the field once, updates `phi` and drifts again. DALF composes
//! two half-size ALF steps; ADALF additionally averages the two `phi`
//! values, which enlarges its stability interval on the imaginary axis to
//! `|h omega| <= 4/3`.
//!
//! Besides the steppers the crate provides an exact propagator for the
//! one-dimensional Kepler oscillator, linear stability analysis, trajectory
//! diagnostics and a jerk-based step-size controller.
//!
//! ```
//! use asyncleap::{drive_fixed, systems::tanh_system, Method};
//!
//! let sys = tanh_system();
//! let run = drive_fixed(Method::Dalf, &sys, 0.0, [0.0], 0.1, 10).unwrap();
//! assert!((run.last().psi[0] - 1f64.tanh()).abs() < 1e-3);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod drive;
pub mod error;
pub mod experiments;
pub mod integrators;
pub mod kepler;
pub mod stability;
pub mod state;
pub mod stepcontrol;
pub mod system;
pub mod systems;
pub mod trajectory;

pub use drive::{drive_fixed, drive_fixed_from, drive_leapfrog, drive_verlet, Integrator};
pub use error::{Error, Result};
pub use integrators::{Method, Rk2Params, StepOutcome};
pub use num_complex::Complex64;
pub use state::{init_phase_state, PhaseState, StateVector};
pub use stepcontrol::{auto_step, drive_adaptive, StepControlConfig};
pub use system::{MechanicalSystem, OdeSystem, SecondOrderSystem};
pub use trajectory::{RunStatus, TrajectoryRecord};
