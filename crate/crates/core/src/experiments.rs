//! Kepler-oscillator runs shared by the acceptance suite and the CLI.

use crate::diagnostics::{kepler_samples, mean_trajectory_error, order_fit, OrderReport};
use crate::drive::{drive_fixed, drive_leapfrog, drive_verlet, Integrator};
use crate::error::{Error, Result};
use crate::integrators::LfInit;
use crate::kepler::{self, KeplerOrbit, KeplerState, DEFAULT_ACC};
use crate::state::{init_phase_state, StateVector};
use crate::stepcontrol::{drive_adaptive_integrator, StepControlConfig};
use crate::systems::{kepler_accel, kepler_system};
use crate::trajectory::TrajectoryRecord;

/// Turning point where a Kepler run starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeplerStart {
    Perihelion,
    Aphelion,
}

impl KeplerStart {
    pub fn state(self, eps: f64) -> KeplerState {
        match self {
            KeplerStart::Perihelion => kepler::perihelion_state(eps),
            KeplerStart::Aphelion => kepler::aphelion_state(eps),
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "eccentricity (0, 1)",
            value: eps,
        })
    }
}

/// Fixed-step run of `integrator` on the Kepler oscillator of eccentricity
/// `eps`. The classic leapfrog takes its second start value from the exact
/// solution.
pub fn run_kepler_fixed(
    integrator: Integrator,
    eps: f64,
    start: KeplerStart,
    h: f64,
    n_steps: usize,
) -> Result<TrajectoryRecord> {
    check_eps(eps)?;
    let s0 = start.state(eps);
    match integrator {
        Integrator::Phi(m) => drive_fixed(m, &kepler_system(), s0.t, [s0.x, s0.v], h, n_steps),
        Integrator::StormerVerlet => {
            drive_verlet(&kepler_accel(), s0.t, [s0.x], [s0.v], h, n_steps)
        }
        Integrator::ClassicLeapfrog => {
            let orbit = KeplerOrbit::new(s0, DEFAULT_ACC)?;
            let exact = move |t: f64| {
                let s = orbit.state_at(t).expect("bound reference orbit");
                StateVector::from([s.x, s.v])
            };
            drive_leapfrog(
                &kepler_system(),
                s0.t,
                [s0.x, s0.v],
                h,
                n_steps,
                LfInit::Exact(&exact),
            )
        }
    }
}

/// `periods` revolutions at `steps_per_period` steps each.
pub fn run_kepler_periods(
    integrator: Integrator,
    eps: f64,
    start: KeplerStart,
    steps_per_period: u32,
    periods: u32,
) -> Result<TrajectoryRecord> {
    let h = kepler::period(eps) / steps_per_period as f64;
    run_kepler_fixed(
        integrator,
        eps,
        start,
        h,
        (steps_per_period * periods) as usize,
    )
}

/// Mean relative-coordinate error of a Kepler run against the exact orbit
/// through its first state.
pub fn kepler_mean_error(rec: &TrajectoryRecord) -> Result<f64> {
    let samples = kepler_samples(rec);
    let orbit = KeplerOrbit::new(samples[0], DEFAULT_ACC)?;
    mean_trajectory_error(&samples, &orbit)
}

/// Mean error for `levels` step sizes `t_P / (n_per_rev 2^k)` over
/// `periods` revolutions, with the fitted order.
pub fn order_study(
    integrator: Integrator,
    eps: f64,
    n_per_rev: u32,
    periods: u32,
    levels: u32,
) -> Result<OrderReport> {
    let mut hs = Vec::new();
    let mut errors = Vec::new();
    for k in 0..levels {
        let n = n_per_rev << k;
        let rec = run_kepler_periods(integrator, eps, KeplerStart::Perihelion, n, periods)?;
        hs.push(kepler::period(eps) / n as f64);
        errors.push(kepler_mean_error(&rec)?);
    }
    order_fit(&hs, &errors)
}

/// Controlled run over `periods` revolutions. `phi` is initialized from
/// the field; that evaluation is included in the record's counts.
pub fn run_kepler_adaptive(
    integrator: Integrator,
    eps: f64,
    start: KeplerStart,
    periods: f64,
    cfg: &StepControlConfig,
) -> Result<TrajectoryRecord> {
    check_eps(eps)?;
    let s0 = start.state(eps);
    let sys = kepler_system();
    let initial = init_phase_state(&sys, s0.t, [s0.x, s0.v])?;
    let t_end = s0.t + periods * kepler::period(eps);
    let mut rec = drive_adaptive_integrator(integrator, &sys, initial, t_end, cfg)?;
    rec.initial_fevals += 1;
    for f in &mut rec.fevals {
        *f += 1;
    }
    Ok(rec)
}

/// Controller settings for a run of `periods` revolutions at `eps`.
pub fn kepler_step_control(
    eps: f64,
    periods: f64,
    kink_crit: f64,
    frac: f64,
) -> Result<StepControlConfig> {
    check_eps(eps)?;
    StepControlConfig::for_interval(0.0, periods * kepler::period(eps), kink_crit, frac)
}

/// Summary of one run in an eccentricity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub integrator: Integrator,
    pub mean_error: f64,
    pub fevals: u64,
    pub min_h: f64,
    pub max_h: f64,
    pub record: TrajectoryRecord,
}

/// One controlled revolution from perihelion for every `(eps, integrator)`.
pub fn autostep_sweep(
    integrators: &[Integrator],
    eps_values: &[f64],
    kink_crit: f64,
    frac: f64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &eps in eps_values {
        let cfg = kepler_step_control(eps, 1.0, kink_crit, frac)?;
        for &integrator in integrators {
            let record = run_kepler_adaptive(integrator, eps, KeplerStart::Perihelion, 1.0, &cfg)?;
            rows.push(SweepRow {
                eps,
                integrator,
                mean_error: kepler_mean_error(&record)?,
                fevals: record.feval_count(),
                min_h: interior_steps(&record).fold(f64::INFINITY, f64::min),
                max_h: interior_steps(&record).fold(0.0, f64::max),
                record,
            });
        }
    }
    Ok(rows)
}

/// Accepted step sizes without the final step, which is clamped to hit the
/// end time and says nothing about the controller.
pub fn interior_steps(rec: &TrajectoryRecord) -> impl Iterator<Item = f64> + '_ {
    let n = match rec.step_sizes.len() {
        0 | 1 => rec.step_sizes.len(),
        n => n - 1,
    };
    rec.step_sizes[..n].iter().copied()
}

/// `a, a + s, ..., b` with `b` included when it lies on the grid (up to
/// rounding).
pub fn eps_sweep(a: f64, s: f64, b: f64) -> Result<Vec<f64>> {
    if !(s > 0.0 && a <= b) {
        return Err(Error::Config(format!("invalid sweep {a}:{s}:{b}")));
    }
    let n = ((b - a) / s + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| a + k as f64 * s).collect())
}
