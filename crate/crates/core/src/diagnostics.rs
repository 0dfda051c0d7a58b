//! Error and quality measures for computed trajectories.

use crate::error::{Error, Result};
use crate::integrators::StepOutcome;
use crate::kepler::{self, KeplerOrbit, KeplerState};
use crate::state::{vector_norm, StateVector};
use crate::system::OdeSystem;
use crate::trajectory::TrajectoryRecord;

/// Guard against `0/0` in [`kappa`].
pub const TINY: f64 = 1e-300;

/// `|a - b| / (|a| + |b| + TINY)`, a dimensionless mismatch in `[0, 1]`.
pub fn kappa(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.hypot(x - y));
    diff / (vector_norm(a) + vector_norm(b) + TINY)
}

/// Mean over the kicks of a step of `kappa(F, phi_before_kick)`.
///
/// `None` for steppers without kicks (Runge-Kutta, Verlet).
pub fn step_jerk(outcome: &StepOutcome) -> Option<f64> {
    if outcome.kicks.is_empty() {
        return None;
    }
    let sum: f64 = outcome
        .kicks
        .iter()
        .map(|k| kappa(&k.field, &k.phi_before))
        .sum();
    Some(sum / outcome.kicks.len() as f64)
}

/// `|phi_n - F(t_n, psi_n)|` per state. Costs one evaluation per state and
/// is exactly zero for a freshly initialized first state.
pub fn delta_monitor(sys: &OdeSystem, traj: &TrajectoryRecord) -> Result<Vec<f64>> {
    traj.states
        .iter()
        .map(|s| {
            let f = sys.eval(s.t, &s.psi)?;
            Ok(s.phi.distance(&f))
        })
        .collect()
}

/// `(t, x, v)` samples of a Kepler-oscillator trajectory. First-order runs
/// store `psi = [x, v]`; Verlet runs store `psi = [x]` and `phi = [v]`.
pub fn kepler_samples(traj: &TrajectoryRecord) -> Vec<KeplerState> {
    traj.states
        .iter()
        .map(|s| match s.psi.len() {
            2 => KeplerState::new(s.t, s.psi[0], s.psi[1]),
            _ => KeplerState::new(s.t, s.psi[0], s.phi[0]),
        })
        .collect()
}

/// Scales that turn `(dx, dv)` into relative coordinates:
/// `x_max - x_min` and `v_max - v_min` of the orbit with eccentricity `eps`.
pub fn relative_scales(eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain {
            what: "relative coordinates (eps in (0, 1))",
            value: eps,
        });
    }
    let (lo, hi) = kepler::x_range(eps);
    Ok((hi - lo, 2.0 * kepler::v_extreme(eps)))
}

/// A computed state mapped back to the initial time by the exact flow,
/// as a deviation from the initial state in relative coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NipPoint {
    pub t: f64,
    pub dx_rel: f64,
    pub dv_rel: f64,
}

/// Numerical interaction picture of `samples` relative to `orbit`, whose
/// reference state is the common initial state.
pub fn nip_trajectory(samples: &[KeplerState], orbit: &KeplerOrbit) -> Result<Vec<NipPoint>> {
    let start = orbit.reference();
    let (sx, sv) = relative_scales(orbit.elements().eps)?;
    let acc = orbit.acc();
    samples
        .iter()
        .map(|s| {
            if s.t == start.t {
                return Ok(NipPoint {
                    t: s.t,
                    dx_rel: (s.x - start.x) / sx,
                    dv_rel: (s.v - start.v) / sv,
                });
            }
            let back = kepler::exact_evolve(s, start.t, acc)?;
            Ok(NipPoint {
                t: s.t,
                dx_rel: (back.x - start.x) / sx,
                dv_rel: (back.v - start.v) / sv,
            })
        })
        .collect()
}

/// Length of the polyline through the interaction-picture points.
pub fn polyline_length(points: &[NipPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].dx_rel - w[0].dx_rel).hypot(w[1].dv_rel - w[0].dv_rel))
        .sum()
}

/// Mean over `samples` of the relative-coordinate distance to the exact
/// state at the same time.
pub fn mean_trajectory_error(samples: &[KeplerState], orbit: &KeplerOrbit) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Config("empty trajectory".into()));
    }
    let (sx, sv) = relative_scales(orbit.elements().eps)?;
    let mut sum = 0.0;
    for s in samples {
        let exact = orbit.state_at(s.t)?;
        sum += ((s.x - exact.x) / sx).hypot((s.v - exact.v) / sv);
    }
    Ok(sum / samples.len() as f64)
}

/// `H(v_i, x_i) - H(v_0, x_0)` along the samples.
pub fn energy_drift(samples: &[KeplerState]) -> Result<Vec<f64>> {
    let Some(first) = samples.first() else {
        return Ok(Vec::new());
    };
    let h0 = first.energy()?;
    samples.iter().map(|s| Ok(s.energy()? - h0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub step_sizes: Vec<f64>,
    pub mean_errors: Vec<f64>,
    /// Least-squares slope of `log2(error)` against `log2(h)`.
    pub slope: f64,
}

pub fn order_fit(step_sizes: &[f64], mean_errors: &[f64]) -> Result<OrderReport> {
    if step_sizes.len() != mean_errors.len() || step_sizes.len() < 3 {
        return Err(Error::Config(
            "order fit needs at least three (h, error) pairs".into(),
        ));
    }
    if let Some(&h) = step_sizes.iter().find(|h| !(**h > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h,
            reason: "step sizes must be positive",
        });
    }
    if let Some(&e) = mean_errors.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "error",
            value: e,
            reason: "errors must be positive for a logarithmic fit",
        });
    }
    let xs: Vec<f64> = step_sizes.iter().map(|h| h.log2()).collect();
    let ys: Vec<f64> = mean_errors.iter().map(|e| e.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(OrderReport {
        step_sizes: step_sizes.to_vec(),
        mean_errors: mean_errors.to_vec(),
        slope: sxy / sxx,
    })
}

/// Quadratic Bezier curve with control points `start`, `mid`, `end`,
/// evaluated at `s` in `[0, 1]`; time runs linearly from `start.0` to
/// `end.0`.
///
/// For an ALF step the middle control point is the drift point
/// `psi + (h/2) phi`, and `phi` is the time derivative along the curve.
pub fn bezier_sample(
    start: (f64, &[f64]),
    mid: (f64, &[f64]),
    end: (f64, &[f64]),
    s: f64,
) -> (f64, StateVector) {
    let _ = mid.0;
    let (a, b, c) = ((1.0 - s) * (1.0 - s), 2.0 * s * (1.0 - s), s * s);
    let psi = start
        .1
        .iter()
        .zip(mid.1)
        .zip(end.1)
        .map(|((p0, p1), p2)| a * p0 + b * p1 + c * p2)
        .collect::<Vec<_>>();
    (start.0 + s * (end.0 - start.0), psi.into())
}

/// Derivative of [`bezier_sample`] with respect to time.
pub fn bezier_velocity(
    start: (f64, &[f64]),
    mid: (f64, &[f64]),
    end: (f64, &[f64]),
    s: f64,
) -> StateVector {
    let h = end.0 - start.0;
    start
        .1
        .iter()
        .zip(mid.1)
        .zip(end.1)
        .map(|((p0, p1), p2)| (2.0 * (1.0 - s) * (p1 - p0) + 2.0 * s * (p2 - p1)) / h)
        .collect::<Vec<_>>()
        .into()
}
