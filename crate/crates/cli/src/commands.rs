//! Execution of resolved runs. Every command writes the metadata line, a
//! header row and then data rows, and reports the worst run status it saw.

use std::io::Write;

use asyncleap::diagnostics::{bezier_sample, energy_drift, kepler_samples, nip_trajectory};
use asyncleap::experiments::{
    interior_steps, kepler_mean_error, kepler_step_control, order_study, run_kepler_adaptive,
    run_kepler_fixed, KeplerStart,
};
use asyncleap::integrators::LfInit;
use asyncleap::kepler::{self, steps_per_rev, KeplerOrbit, DEFAULT_ACC};
use asyncleap::stability::stability_region_scan;
use asyncleap::stepcontrol::drive_adaptive_integrator;
use asyncleap::systems::{
    arctan_blowup_system, arctan_exact, kepler_accel, kepler_system, linear_test_system,
    tanh_exact, tanh_system,
};
use asyncleap::Complex64;
use asyncleap::{
    drive_fixed, drive_leapfrog, drive_verlet, init_phase_state, Integrator, OdeSystem, Result,
    RunStatus, StateVector, TrajectoryRecord,
};

use crate::config::{
    AutostepConfig, KeplerExactConfig, NipConfig, OrderConfig, Resolved, RunConfig,
    StabilityConfig, Stepping, SystemKind, TrajectoryConfig,
};
use crate::error::{status_code, CliResult};

/// 17 significant digits, enough to read every `f64` back exactly.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

type Csv<W> = csv::Writer<W>;

fn open<W: Write>(mut out: W, meta: &str, header: &[String]) -> CliResult<Csv<W>> {
    writeln!(out, "{meta}")?;
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn worst(a: RunStatus, b: RunStatus) -> RunStatus {
    if status_code(b) > status_code(a) {
        b
    } else {
        a
    }
}

pub fn execute<W: Write>(run: &Resolved, out: W) -> CliResult<RunStatus> {
    let meta = run.metadata_line();
    match &run.config {
        RunConfig::Trajectory(cfg) => trajectory(cfg, &meta, out),
        RunConfig::Stability(cfg) => stability(cfg, &meta, out),
        RunConfig::Order(cfg) => order(cfg, &meta, out),
        RunConfig::Nip(cfg) => nip(cfg, &meta, out),
        RunConfig::Autostep(cfg) => autostep(cfg, &meta, out),
        RunConfig::KeplerExact(cfg) => kepler_exact(cfg, &meta, out),
    }
}

fn build_system(kind: &SystemKind) -> OdeSystem {
    match kind {
        SystemKind::Tanh => tanh_system(),
        SystemKind::Arctan => arctan_blowup_system(),
        SystemKind::Linear { omega } => linear_test_system(*omega),
        SystemKind::Kepler { .. } => kepler_system(),
    }
}

/// Exact solution through the configured initial state, used to start the
/// classic leapfrog.
fn exact_state(cfg: &TrajectoryConfig, t: f64) -> Result<StateVector> {
    let (t0, psi0) = (cfg.t0, &cfg.psi0);
    Ok(match &cfg.system {
        SystemKind::Tanh => StateVector::from([tanh_exact(t0, psi0[0])?(t)]),
        SystemKind::Arctan => StateVector::from([arctan_exact(t)]),
        SystemKind::Linear { omega } => {
            let z = (omega * (t - t0)).exp() * Complex64::new(psi0[0], psi0[1]);
            StateVector::from([z.re, z.im])
        }
        SystemKind::Kepler { eps, start } => {
            let s = kepler::exact_evolve(&start.state(*eps), t, DEFAULT_ACC)?;
            StateVector::from([s.x, s.v])
        }
    })
}

fn run_trajectory(cfg: &TrajectoryConfig) -> Result<TrajectoryRecord> {
    let sys = build_system(&cfg.system);
    match (&cfg.stepping, cfg.integrator) {
        (Stepping::Fixed { h, n_steps }, Integrator::Phi(m)) => {
            drive_fixed(m, &sys, cfg.t0, cfg.psi0.clone(), *h, *n_steps)
        }
        (Stepping::Fixed { h, n_steps }, Integrator::StormerVerlet) => drive_verlet(
            &kepler_accel(),
            cfg.t0,
            [cfg.psi0[0]],
            [cfg.psi0[1]],
            *h,
            *n_steps,
        ),
        (Stepping::Fixed { h, n_steps }, Integrator::ClassicLeapfrog) => {
            let psi1 = exact_state(cfg, cfg.t0 + h)?;
            let exact = move |_: f64| psi1.clone();
            drive_leapfrog(
                &sys,
                cfg.t0,
                cfg.psi0.clone(),
                *h,
                *n_steps,
                LfInit::Exact(&exact),
            )
        }
        (
            Stepping::Controlled {
                cfg: control,
                t_end,
            },
            integrator,
        ) => {
            let initial = init_phase_state(&sys, cfg.t0, cfg.psi0.clone())?;
            let mut rec = drive_adaptive_integrator(integrator, &sys, initial, *t_end, control)?;
            rec.initial_fevals += 1;
            for f in &mut rec.fevals {
                *f += 1;
            }
            Ok(rec)
        }
    }
}

fn trajectory<W: Write>(cfg: &TrajectoryConfig, meta: &str, out: W) -> CliResult<RunStatus> {
    let rec = run_trajectory(cfg)?;
    let (dpsi, dphi) = (rec.states[0].psi.len(), rec.states[0].phi.len());

    let mut cols = header(&["step_index", "t"]);
    cols.extend((0..dpsi).map(|j| format!("psi_{j}")));
    cols.extend((0..dphi).map(|j| format!("phi_{j}")));
    cols.extend(header(&["h", "jerk", "cum_fevals", "status"]));
    let kepler = cfg.system.is_kepler();
    if kepler {
        cols.extend(header(&["exact_x", "exact_v", "energy_drift"]));
    }
    for k in 1..=cfg.bezier {
        cols.push(format!("bez{k}_t"));
        cols.extend((0..dpsi).map(|j| format!("bez{k}_psi_{j}")));
    }

    let (orbit, drift) = if kepler {
        let samples = kepler_samples(&rec);
        (
            Some(KeplerOrbit::new(samples[0], DEFAULT_ACC)?),
            energy_drift(&samples)?,
        )
    } else {
        (None, Vec::new())
    };

    let mut w = open(out, meta, &cols)?;
    let status = rec.status.to_string();
    for i in 0..rec.steps() {
        let (s0, s1, h) = (&rec.states[i], &rec.states[i + 1], rec.step_sizes[i]);
        let mut row = vec![(i + 1).to_string(), num(s1.t)];
        row.extend(s1.psi.iter().map(|&x| num(x)));
        row.extend(s1.phi.iter().map(|&x| num(x)));
        row.extend([
            num(h),
            num(rec.jerk_values[i]),
            rec.fevals[i].to_string(),
            status.clone(),
        ]);
        if let Some(orbit) = &orbit {
            let exact = orbit.state_at(s1.t)?;
            row.extend([num(exact.x), num(exact.v), num(drift[i + 1])]);
        }
        if cfg.bezier > 0 {
            // The middle control point is where the first drift lands.
            let mid = s0.psi.scaled_sum(0.5 * h, &s0.phi);
            for k in 1..=cfg.bezier {
                let s = k as f64 / (cfg.bezier + 1) as f64;
                let (t, psi) =
                    bezier_sample((s0.t, &s0.psi), (s0.t + 0.5 * h, &mid), (s1.t, &s1.psi), s);
                row.push(num(t));
                row.extend(psi.iter().map(|&x| num(x)));
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(rec.status)
}

fn stability<W: Write>(cfg: &StabilityConfig, meta: &str, out: W) -> CliResult<RunStatus> {
    let grid = stability_region_scan(cfg.method, cfg.window, cfg.nx, cfg.ny);
    let mut w = open(out, meta, &header(&["re", "im", "stable"]))?;
    for (z, stable) in grid.iter() {
        w.write_record([num(z.re), num(z.im), u8::from(stable).to_string()])?;
    }
    w.flush()?;
    Ok(RunStatus::Completed)
}

fn order<W: Write>(cfg: &OrderConfig, meta: &str, out: W) -> CliResult<RunStatus> {
    let mut w = open(out, meta, &header(&["method", "h", "mean_error", "slope"]))?;
    for &integrator in &cfg.integrators {
        let report = order_study(integrator, cfg.eps, cfg.n_per_rev, cfg.periods, cfg.levels)?;
        for (h, e) in report.step_sizes.iter().zip(&report.mean_errors) {
            w.write_record([integrator.name(), num(*h), num(*e), num(report.slope)])?;
        }
    }
    w.flush()?;
    Ok(RunStatus::Completed)
}

fn nip<W: Write>(cfg: &NipConfig, meta: &str, out: W) -> CliResult<RunStatus> {
    let h = kepler::period(cfg.eps) / cfg.n_per_rev as f64;
    let mut w = open(out, meta, &header(&["method", "t", "dx_rel", "dv_rel"]))?;
    let mut status = RunStatus::Completed;
    for &integrator in &cfg.integrators {
        let rec = run_kepler_fixed(integrator, cfg.eps, cfg.start, h, cfg.n_steps)?;
        status = worst(status, rec.status);
        let samples = kepler_samples(&rec);
        let orbit = KeplerOrbit::new(samples[0], DEFAULT_ACC)?;
        for p in nip_trajectory(&samples, &orbit)? {
            w.write_record([integrator.name(), num(p.t), num(p.dx_rel), num(p.dv_rel)])?;
        }
    }
    w.flush()?;
    Ok(status)
}

fn autostep<W: Write>(cfg: &AutostepConfig, meta: &str, out: W) -> CliResult<RunStatus> {
    let cols = header(&[
        "eps",
        "method",
        "mode",
        "mean_error",
        "total_fevals",
        "steps",
        "min_h",
        "max_h",
        "status",
    ]);
    let mut w = open(out, meta, &cols)?;
    let mut status = RunStatus::Completed;
    for &eps in &cfg.eps_values {
        let control = kepler_step_control(eps, cfg.periods, cfg.kink_crit, cfg.frac)?;
        let n = steps_per_rev(eps, cfg.n_per_rev);
        let h_fixed = kepler::period(eps) / n as f64;
        let n_fixed = (cfg.periods * n as f64 - 1e-9).ceil() as usize;
        for &integrator in &cfg.integrators {
            let adaptive = run_kepler_adaptive(
                integrator,
                eps,
                KeplerStart::Perihelion,
                cfg.periods,
                &control,
            )?;
            let fixed =
                run_kepler_fixed(integrator, eps, KeplerStart::Perihelion, h_fixed, n_fixed)?;
            for (mode, rec) in [("adaptive", &adaptive), ("fixed", &fixed)] {
                status = worst(status, rec.status);
                let (lo, hi) = match mode {
                    "adaptive" => (
                        interior_steps(rec).fold(f64::INFINITY, f64::min),
                        interior_steps(rec).fold(0.0, f64::max),
                    ),
                    _ => (h_fixed, h_fixed),
                };
                w.write_record([
                    num(eps),
                    integrator.name(),
                    mode.to_string(),
                    num(kepler_mean_error(rec)?),
                    rec.feval_count().to_string(),
                    rec.steps().to_string(),
                    num(lo),
                    num(hi),
                    rec.status.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(status)
}

fn kepler_exact<W: Write>(cfg: &KeplerExactConfig, meta: &str, out: W) -> CliResult<RunStatus> {
    let start = cfg.start.state(cfg.eps);
    let orbit = KeplerOrbit::new(start, DEFAULT_ACC)?;
    let dt = kepler::period(cfg.eps) / cfg.n_per_rev as f64;
    let mut w = open(out, meta, &header(&["t", "x", "v", "H"]))?;
    for k in 0..cfg.n_samples {
        let s = orbit.state_at(start.t + k as f64 * dt)?;
        w.write_record([num(s.t), num(s.x), num(s.v), num(s.energy()?)])?;
    }
    w.flush()?;
    Ok(RunStatus::Completed)
}
