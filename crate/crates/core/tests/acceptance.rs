//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use asyncleap::diagnostics::{
    bezier_sample, bezier_velocity, energy_drift, kappa, kepler_samples, nip_trajectory,
    polyline_length,
};
use asyncleap::experiments::{
    autostep_sweep, eps_sweep, kepler_mean_error, kepler_step_control, order_study,
    run_kepler_adaptive, run_kepler_periods, KeplerStart,
};
use asyncleap::integrators::{
    alf_step, classic_lf_step, dalf_step, lf_init, reverse_pair, LeapfrogPair, LfInit, TimedState,
};
use asyncleap::kepler::{self, KeplerOrbit, KeplerState};
use asyncleap::stability::closed_form::{alf_matrix, dalf_matrix, ev_adalf, rk2_matrix};
use asyncleap::stability::{
    eigenvalues, imaginary_axis_boundary, is_absolutely_stable, propagation_matrix_numeric,
    PropagationMatrix,
};
use asyncleap::systems::{arctan_blowup_system, kepler_system, tanh_system};
use asyncleap::{
    drive_fixed, Integrator, Method, PhaseState, Rk2Params, RunStatus, TrajectoryRecord,
};
use num_complex::Complex64;

type Criterion = (&'static str, fn() -> Outcome);

/// Sub-checks of one criterion.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failures.push(what.clone());
        }
        self.notes.push(what);
    }

    fn within(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        self.check(
            (value - target).abs() <= tol,
            format!("{label} = {value:.9} (want {target} +/- {tol:e})"),
        );
    }

    fn in_range(&mut self, label: &str, value: f64, lo: f64, hi: f64) {
        self.check(
            value >= lo && value <= hi,
            format!("{label} = {value:.4} (want [{lo}, {hi}])"),
        );
    }
}

type Outcome = Result<Report, asyncleap::Error>;

const RK2_VARIANTS: [Rk2Params; 3] = [Rk2Params::MIDPOINT, Rk2Params::RALSTON, Rk2Params::HEUN];

fn kepler_oracle() -> Outcome {
    let mut r = Report::default();
    r.within("period(0.15)", kepler::period(0.15), 6.501, 1e-3);
    let (lo, hi) = kepler::x_range(0.15);
    r.within("x_min(0.15)", lo, 0.870, 1e-3);
    r.within("x_max(0.15)", hi, 1.176, 1e-3);

    let mut worst_trip = 0.0f64;
    let mut worst_energy = 0.0f64;
    for eps in [0.05, 0.15, 0.5, 0.9] {
        let start = kepler::perihelion_state(eps);
        let h0 = start.energy()?;
        let orbit = KeplerOrbit::new(start, kepler::DEFAULT_ACC)?;
        for k in 0..40 {
            let s = orbit.state_at(k as f64 * kepler::period(eps) / 37.0)?;
            let back = kepler::exact_evolve(&s, s.t + kepler::period(eps), kepler::DEFAULT_ACC)?;
            worst_trip = worst_trip
                .max((back.x - s.x).abs())
                .max((back.v - s.v).abs());
            worst_energy = worst_energy.max((s.energy()? - h0).abs());
        }
    }
    r.check(
        worst_trip <= 1e-9,
        format!("one-period round trip {worst_trip:.2e} <= 1e-9"),
    );
    r.check(
        worst_energy <= 1e-10,
        format!("oracle energy drift {worst_energy:.2e} <= 1e-10"),
    );
    Ok(r)
}

fn stability_boundaries() -> Outcome {
    let mut r = Report::default();
    let tol = 1e-6;
    r.within(
        "ADALF axis boundary",
        imaginary_axis_boundary(Method::Adalf, tol),
        4.0 / 3.0,
        1e-5,
    );
    r.within(
        "DALF axis boundary",
        imaginary_axis_boundary(Method::Dalf, tol),
        2.0,
        1e-5,
    );
    for p in RK2_VARIANTS {
        let b = imaginary_axis_boundary(Method::Rk2(p), tol);
        r.check(b == 0.0, format!("{} axis boundary = {b}", Method::Rk2(p)));
    }
    let all_stable = (-1000..=1000)
        .map(|k| Complex64::new(0.0, k as f64 / 1000.0))
        .all(|z| is_absolutely_stable(Method::ALF, z));
    r.check(all_stable, "ALF stable on [-i, i] including the end points");
    r.check(
        !is_absolutely_stable(Method::ALF, Complex64::new(0.0, 1.0 + 1e-6)),
        "ALF unstable just beyond i",
    );
    Ok(r)
}

fn max_dist(a: &PropagationMatrix, b: &PropagationMatrix) -> f64 {
    a.max_entry_distance(b)
}

fn matrix_cross_validation() -> Outcome {
    let mut r = Report::default();
    let hs = [0.01, 0.1, 0.35, 0.8, 1.5];
    let omegas = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-2.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-0.5, 1.5),
        Complex64::new(0.3, -0.7),
    ];
    let (mut alf, mut dalf, mut rk2) = (0.0f64, 0.0f64, 0.0f64);
    let (mut tr, mut det, mut ev) = (0.0f64, 0.0f64, 0.0f64);
    for &h in &hs {
        for &w in &omegas {
            let z = w * h;
            alf = alf.max(max_dist(
                &propagation_matrix_numeric(Method::ALF, h, w),
                &alf_matrix(h, w),
            ));
            dalf = dalf.max(max_dist(
                &propagation_matrix_numeric(Method::Dalf, h, w),
                &dalf_matrix(h, w),
            ));
            for p in RK2_VARIANTS {
                let m = propagation_matrix_numeric(Method::Rk2(p), h, w);
                rk2 = rk2.max(max_dist(&m, &rk2_matrix(h, w, p.a1())));
            }
            let m = propagation_matrix_numeric(Method::Adalf, h, w);
            tr = tr.max((m.trace() - (4.0 + 3.0 * z + 3.0 * z * z) / 4.0).norm());
            det = det.max((m.determinant() + z / 4.0).norm());
            let (a, b) = eigenvalues(&m);
            let (x, y) = ev_adalf(z);
            ev = ev
                .max(((a - x).norm().max((b - y).norm())).min((a - y).norm().max((b - x).norm())));
        }
    }
    r.check(alf <= 1e-13, format!("ALF entries {alf:.1e}"));
    r.check(dalf <= 1e-13, format!("DALF entries {dalf:.1e}"));
    r.check(rk2 <= 1e-13, format!("RK2 entries {rk2:.1e}"));
    r.check(tr <= 1e-13, format!("ADALF trace {tr:.1e}"));
    r.check(det <= 1e-13, format!("ADALF determinant {det:.1e}"));
    r.check(ev <= 1e-12, format!("ADALF eigenvalues {ev:.1e}"));
    Ok(r)
}

fn order() -> Outcome {
    let mut r = Report::default();
    let mut methods = vec![
        Integrator::Phi(Method::ALF),
        Integrator::Phi(Method::Dalf),
        Integrator::Phi(Method::Adalf),
    ];
    methods.extend(RK2_VARIANTS.map(|p| Integrator::Phi(Method::Rk2(p))));
    methods.push(Integrator::StormerVerlet);
    for m in methods {
        let report = order_study(m, 0.01, 32, 1, 4)?;
        r.in_range(&format!("{m} slope"), report.slope, 1.9, 2.1);
    }
    Ok(r)
}

fn accuracy_ratio() -> Outcome {
    let mut r = Report::default();
    let err = |m| -> Result<f64, asyncleap::Error> {
        kepler_mean_error(&run_kepler_periods(
            Integrator::Phi(m),
            0.01,
            KeplerStart::Perihelion,
            32,
            1,
        )?)
    };
    let ratio = err(Method::Rk2(Rk2Params::MIDPOINT))? / err(Method::Dalf)?;
    r.in_range("RK2-midpoint / DALF mean error", ratio, 2.0, 8.0);
    Ok(r)
}

/// Jacobian determinant of the map `(psi, phi) -> (psi', phi')` by central
/// differences.
fn jacobian_det(step: impl Fn(f64, f64) -> (f64, f64), psi: f64, phi: f64) -> f64 {
    let d = 1e-6;
    let (a1, b1) = step(psi + d, phi);
    let (a0, b0) = step(psi - d, phi);
    let (c1, e1) = step(psi, phi + d);
    let (c0, e0) = step(psi, phi - d);
    let j11 = (a1 - a0) / (2.0 * d);
    let j21 = (b1 - b0) / (2.0 * d);
    let j12 = (c1 - c0) / (2.0 * d);
    let j22 = (e1 - e0) / (2.0 * d);
    j11 * j22 - j12 * j21
}

fn structural_invariants() -> Outcome {
    let mut r = Report::default();
    let kepler = kepler_system();
    let tanh = tanh_system();

    let mut rev = 0.0f64;
    for (x, v, h) in [(0.9, 0.1, 0.2), (1.1, -0.05, 0.05), (0.75, 0.2, 0.4)] {
        let f = kepler.eval(0.0, &[x, v])?;
        let s = PhaseState::new(0.3, [x, v], [f[0] * 1.1, f[1] * 0.9]);
        let fwd = alf_step(&kepler, &s, h, 1.0)?.state;
        let back = alf_step(&kepler, &fwd, -h, 1.0)?.state;
        rev = rev.max(back.distance(&s) / s.norm());
    }
    r.check(
        rev <= 1e-12,
        format!("ALF reversibility residual {rev:.1e}"),
    );

    let mut ltl = 0.0f64;
    for (t0, dt, a, b) in [
        (0.0, 0.1, 0.0, 0.1),
        (-1.0, 0.3, 0.5, 0.6),
        (2.0, 0.05, -0.8, -0.75),
    ] {
        let p = LeapfrogPair::new(TimedState::new(t0, [a]), TimedState::new(t0 + dt, [b]))?;
        let lhs = classic_lf_step(&tanh, &reverse_pair(&classic_lf_step(&tanh, &p)?))?;
        let rhs = reverse_pair(&p);
        for (x, y) in [
            (lhs.first.psi[0], rhs.first.psi[0]),
            (lhs.second.psi[0], rhs.second.psi[0]),
            (lhs.first.t, rhs.first.t),
            (lhs.second.t, rhs.second.t),
        ] {
            ltl = ltl.max((x - y).abs());
        }
    }
    r.check(ltl <= 1e-13, format!("L o T o L = T residual {ltl:.1e}"));

    let scalar = |m: Method| {
        let tanh = tanh.clone();
        move |psi: f64, phi: f64| {
            let out = m
                .step(&tanh, &PhaseState::new(0.0, [psi], [phi]), 0.3)
                .unwrap()
                .state;
            (out.psi[0], out.phi[0])
        }
    };
    let mut det_alf = 0.0f64;
    let mut det_dalf = 0.0f64;
    for (psi, phi) in [(0.1, 0.9), (-0.4, 0.7), (0.6, 0.5)] {
        det_alf = det_alf.max((jacobian_det(scalar(Method::ALF), psi, phi) + 1.0).abs());
        det_dalf = det_dalf.max((jacobian_det(scalar(Method::Dalf), psi, phi) - 1.0).abs());
    }
    r.check(
        det_alf <= 1e-6,
        format!("ALF Jacobian determinant -1 within {det_alf:.1e}"),
    );
    r.check(
        det_dalf <= 1e-6,
        format!("DALF Jacobian determinant +1 within {det_dalf:.1e}"),
    );

    let mut fused = 0.0f64;
    for (x, v, h) in [(0.9, 0.1, 0.2), (1.3, -0.2, 0.45), (0.72, 0.05, 0.01)] {
        let f = kepler.eval(0.0, &[x, v])?;
        let s = PhaseState::new(0.0, [x, v], [f[0], f[1] * 1.05]);
        let a = dalf_step(&kepler, &s, h)?.state;
        let half = alf_step(&kepler, &s, h / 2.0, 1.0)?.state;
        let b = alf_step(&kepler, &half, h / 2.0, 1.0)?.state;
        fused = fused.max(a.distance(&b) / a.norm());
    }
    r.check(fused <= 1e-15, format!("DALF vs ALF o ALF {fused:.1e}"));
    Ok(r)
}

/// Mean drift of each block of `per` consecutive states after the first.
fn per_period_means(drift: &[f64], per: usize) -> Vec<f64> {
    drift[1..]
        .chunks(per)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn stiff_regime() -> Outcome {
    let mut r = Report::default();
    let (eps, per, periods) = (0.15, 32u32, 16u32);
    let run = |m: Integrator| run_kepler_periods(m, eps, KeplerStart::Perihelion, per, periods);
    let half = (per * periods / 2) as usize;

    let rk2 = run(Integrator::Phi(Method::Rk2(Rk2Params::MIDPOINT)))?;
    let drift = energy_drift(&kepler_samples(&rk2))?;
    let means = per_period_means(&drift, per as usize);
    let monotone = means.windows(2).all(|w| w[1] >= w[0]) && means[means.len() - 1] > 0.0;
    r.check(
        monotone,
        format!(
            "RK2-midpoint drift trends upward: {:.2e} -> {:.2e}",
            means[0],
            means[means.len() - 1]
        ),
    );

    let mut lengths = Vec::new();
    for m in [
        Integrator::StormerVerlet,
        Integrator::Phi(Method::Dalf),
        Integrator::Phi(Method::Adalf),
    ] {
        let rec = run(m)?;
        let drift = energy_drift(&kepler_samples(&rec))?;
        let (first, last) = (max_abs(&drift[..=half]), max_abs(&drift[half..]));
        r.check(
            last <= 2.0 * first,
            format!("{m} drift bounded: last 8 periods {last:.2e} <= 2 x {first:.2e}"),
        );
        lengths.push((m, nip_length(&rec)?));
    }
    let rk2_len = nip_length(&rk2)?;
    for (m, len) in lengths.into_iter().skip(1) {
        r.check(
            rk2_len > len,
            format!("interaction-picture length RK2 {rk2_len:.3} > {m} {len:.3}"),
        );
    }
    Ok(r)
}

fn nip_length(rec: &TrajectoryRecord) -> Result<f64, asyncleap::Error> {
    let samples = kepler_samples(rec);
    let orbit = KeplerOrbit::new(samples[0], kepler::DEFAULT_ACC)?;
    Ok(polyline_length(&nip_trajectory(&samples, &orbit)?))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Times and positions where the velocity turns from inward to outward.
fn inner_turns(rec: &TrajectoryRecord) -> Vec<KeplerState> {
    kepler_samples(rec)
        .windows(2)
        .filter(|w| w[0].v < 0.0 && w[1].v >= 0.0)
        .map(|w| w[1])
        .collect()
}

fn step_control() -> Outcome {
    let mut r = Report::default();
    let (kink, frac) = (1e-3, 0.2);
    let eps = eps_sweep(0.05, 0.05, 0.95)?;
    let leapfrog = [
        Integrator::Phi(Method::Dalf),
        Integrator::Phi(Method::Adalf),
    ];
    let rk2 = RK2_VARIANTS.map(|p| Integrator::Phi(Method::Rk2(p)));
    let methods: Vec<Integrator> = leapfrog.iter().chain(rk2.iter()).copied().collect();
    let rows = autostep_sweep(&methods, &eps, kink, frac)?;

    let worst = rows
        .iter()
        .flat_map(|row| row.record.jerk_values.iter().copied())
        .fold(0.0f64, f64::max);
    let completed = rows
        .iter()
        .all(|row| row.record.status == RunStatus::Completed);
    r.check(
        worst <= kink && completed,
        format!("(a) largest accepted kappa {worst:.3e}, all runs completed"),
    );

    let sweep_mean = |m: Integrator| {
        mean(
            &rows
                .iter()
                .filter(|row| row.integrator == m)
                .map(|row| row.mean_error)
                .collect::<Vec<_>>(),
        )
    };
    let (d, a) = (sweep_mean(leapfrog[0]), sweep_mean(leapfrog[1]));
    let spread = (d - a).abs() / d.min(a);
    r.check(
        spread <= 0.2,
        format!(
            "(b) DALF {d:.3e} vs ADALF {a:.3e}: {:.1}% apart",
            100.0 * spread
        ),
    );

    let lf_family = 0.5 * (d + a);
    let rk_family = mean(&rk2.map(sweep_mean));
    r.in_range(
        "(c) RK2-family / leapfrog-family error",
        rk_family / lf_family,
        2.0,
        8.0,
    );

    let cfg = kepler_step_control(0.99, 1.0, kink, frac)?;
    let rec = run_kepler_adaptive(
        Integrator::Phi(Method::Dalf),
        0.99,
        KeplerStart::Perihelion,
        1.0,
        &cfg,
    )?;
    let turns = inner_turns(&rec);
    let no_bounce = !turns.is_empty() && turns.iter().all(|s| s.x < 0.55);
    r.check(
        rec.status == RunStatus::Completed && no_bounce,
        format!(
            "(d) eps = 0.99 adaptive DALF: {}, inward-to-outward turns at x = {:?}",
            rec.status,
            turns
                .iter()
                .map(|s| format!("{:.4}", s.x))
                .collect::<Vec<_>>()
        ),
    );
    Ok(r)
}

fn oracle_free() -> Outcome {
    let mut r = Report::default();

    let vectors: Vec<Vec<f64>> = (0..40)
        .map(|k| {
            let k = k as f64;
            vec![(1.3 * k).sin() * 5.0, (0.7 * k + 1.0).cos() * 0.3, k - 20.0]
        })
        .collect();
    let mut kappa_ok = true;
    for a in &vectors {
        for b in &vectors {
            let k = kappa(a, b);
            kappa_ok &= (0.0..=1.0).contains(&k) && k == kappa(b, a);
        }
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        kappa_ok &= kappa(a, a) == 0.0 && (kappa(a, &neg) - 1.0).abs() <= 1e-15;
    }
    r.check(
        kappa_ok,
        "kappa in [0, 1], symmetric, kappa(v, v) = 0, kappa(v, -v) = 1",
    );

    let (p0, p1, p2) = ([0.2, -1.0], [0.7, 0.4], [1.5, 0.1]);
    let (t0, e0) = bezier_sample((0.0, &p0), (0.5, &p1), (1.0, &p2), 0.0);
    let (t1, e1) = bezier_sample((0.0, &p0), (0.5, &p1), (1.0, &p2), 1.0);
    let (tm, em) = bezier_sample((0.0, &p0), (0.5, &p1), (1.0, &p2), 0.5);
    let mid_ok = (0..2).all(|i| (em[i] - (p0[i] + 2.0 * p1[i] + p2[i]) / 4.0).abs() <= 1e-15);
    r.check(
        t0 == 0.0 && e0.as_slice() == p0 && t1 == 1.0 && e1.as_slice() == p2 && tm == 0.5 && mid_ok,
        "Bezier end points and midpoint",
    );

    let sys = tanh_system();
    let h = 0.25;
    let rec = drive_fixed(Method::ALF, &sys, 0.0, [-0.6], h, 12)?;
    let mut c1 = 0.0f64;
    for w in rec.states.windows(3) {
        let seg = |a: &PhaseState, b: &PhaseState, s: f64| {
            let ctrl = a.psi.scaled_sum(0.5 * h, &a.phi);
            bezier_velocity((a.t, &a.psi), (a.t + 0.5 * h, &ctrl), (b.t, &b.psi), s)
        };
        let end = seg(&w[0], &w[1], 1.0);
        let start = seg(&w[1], &w[2], 0.0);
        c1 = c1
            .max((end[0] - start[0]).abs())
            .max((end[0] - w[1].phi[0]).abs());
    }
    r.check(
        c1 <= 1e-13,
        format!("ALF Bezier chain is C1 (tangent mismatch {c1:.1e})"),
    );

    let arctan = arctan_blowup_system();
    let run = drive_fixed(Method::Dalf, &arctan, 0.0, [0.0], 0.01, 1000)?;
    r.check(
        run.status == RunStatus::BlewUp
            && run.last().t < PI / 2.0 + 0.1
            && run.states.iter().all(|s| s.is_finite()),
        format!("arctan blow-up detected at t = {:.3}", run.last().t),
    );

    let pair = lf_init(
        &sys,
        0.0,
        [0.0],
        0.5,
        LfInit::Trapezoidal {
            tol: 1e-13,
            max_iter: 200,
        },
    )?;
    let root = 6f64.sqrt() - 2.0;
    r.within("trapezoidal start value", pair.second.psi[0], root, 1e-10);
    Ok(r)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Kepler oracle", kepler_oracle),
        ("stability boundaries", stability_boundaries),
        (
            "propagation-matrix cross-validation",
            matrix_cross_validation,
        ),
        ("order", order),
        ("accuracy ratio", accuracy_ratio),
        ("structural invariants", structural_invariants),
        ("stiff-regime behavior", stiff_regime),
        ("step control", step_control),
        ("oracle-free properties", oracle_free),
    ];
    let verbose = std::env::args().any(|a| a == "--verbose");
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let line = match run() {
            Ok(report) if report.failures.is_empty() => {
                if verbose {
                    for n in &report.notes {
                        println!("    {n}");
                    }
                }
                format!("PASS  criterion {}: {name}", i + 1)
            }
            Ok(report) => {
                failed += 1;
                format!(
                    "FAIL  criterion {}: {name}: {}",
                    i + 1,
                    report.failures.join("; ")
                )
            }
            Err(e) => {
                failed += 1;
                format!("FAIL  criterion {}: {name}: error: {e}", i + 1)
            }
        };
        println!("{line}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
