//! Turns parsed options into a fully resolved, validated run description.
//!
//! Each command takes the options it understands; anything left over is a
//! usage error, so a flag is never silently ignored.

use std::fmt::Display;

use asyncleap::experiments::{eps_sweep, KeplerStart};
use asyncleap::kepler;
use asyncleap::stability::Window;
use asyncleap::Complex64;
use asyncleap::{Integrator, Method, Rk2Params, StepControlConfig};

use crate::args::{Command, MethodArg, Options, StartArg, SystemArg};
use crate::error::{CliError, CliResult};

pub const DEFAULT_METHOD: MethodArg = MethodArg::Dalf;

#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    Tanh,
    Arctan,
    Linear { omega: Complex64 },
    Kepler { eps: f64, start: KeplerStart },
}

impl SystemKind {
    pub fn is_kepler(&self) -> bool {
        matches!(self, SystemKind::Kepler { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stepping {
    Fixed { h: f64, n_steps: usize },
    Controlled { cfg: StepControlConfig, t_end: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    pub system: SystemKind,
    pub integrator: Integrator,
    pub t0: f64,
    pub psi0: Vec<f64>,
    pub stepping: Stepping,
    /// Interior Bezier samples per step; 0 disables the column block.
    pub bezier: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityConfig {
    pub method: Method,
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderConfig {
    pub integrators: Vec<Integrator>,
    pub eps: f64,
    pub n_per_rev: u32,
    pub periods: u32,
    pub levels: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NipConfig {
    pub integrators: Vec<Integrator>,
    pub eps: f64,
    pub start: KeplerStart,
    pub n_per_rev: u32,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutostepConfig {
    pub integrators: Vec<Integrator>,
    pub eps_values: Vec<f64>,
    pub periods: f64,
    pub kink_crit: f64,
    pub frac: f64,
    /// Resolution at low eccentricity of the fixed-step baseline.
    pub n_per_rev: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeplerExactConfig {
    pub eps: f64,
    pub start: KeplerStart,
    pub n_per_rev: u32,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Trajectory(TrajectoryConfig),
    Stability(StabilityConfig),
    Order(OrderConfig),
    Nip(NipConfig),
    Autostep(AutostepConfig),
    KeplerExact(KeplerExactConfig),
}

/// A run description together with its `key=value` record for the output
/// header.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub command: Command,
    pub config: RunConfig,
    pub meta: Vec<(&'static str, String)>,
}

impl Resolved {
    /// The `#` line that opens every output file.
    pub fn metadata_line(&self) -> String {
        let mut line = format!(
            "# asyncleap {} command={}",
            env!("CARGO_PKG_VERSION"),
            self.command.name()
        );
        for (k, v) in &self.meta {
            line.push_str(&format!(" {k}={v}"));
        }
        line
    }
}

struct Resolver {
    opts: Options,
    meta: Vec<(&'static str, String)>,
}

impl Resolver {
    fn note(&mut self, key: &'static str, value: impl Display) {
        self.meta.push((key, value.to_string()));
    }

    /// Floats use the shortest representation that reads back exactly.
    fn note_num(&mut self, key: &'static str, x: f64) {
        self.meta.push((key, format!("{x:?}")));
    }

    fn leftovers(&self) -> Vec<&'static str> {
        let o = &self.opts;
        let flags = [
            ("--method", o.method.is_some()),
            ("--a1", o.a1.is_some()),
            ("--lambda", o.lambda.is_some()),
            ("--system", o.system.is_some()),
            ("--eps", o.eps.is_some()),
            ("--eps-sweep", o.eps_sweep.is_some()),
            ("--h", o.h.is_some()),
            ("--n-per-rev", o.n_per_rev.is_some()),
            ("--periods", o.periods.is_some()),
            ("--t-end", o.t_end.is_some()),
            ("--window", o.window.is_some()),
            ("--grid", o.grid.is_some()),
            ("--kink-crit", o.kink_crit.is_some()),
            ("--frac", o.frac.is_some()),
            ("--omega", o.omega.is_some()),
            ("--start", o.start.is_some()),
            ("--bezier", o.bezier.is_some()),
            ("--levels", o.levels.is_some()),
        ];
        flags
            .iter()
            .filter(|(_, set)| *set)
            .map(|(f, _)| *f)
            .collect()
    }

    fn finish(self, command: Command, config: RunConfig) -> CliResult<Resolved> {
        let unused = self.leftovers();
        if !unused.is_empty() {
            return Err(CliError::usage(format!(
                "{} not used by '{}' with these settings",
                unused.join(", "),
                command.name()
            )));
        }
        Ok(Resolved {
            command,
            config,
            meta: self.meta,
        })
    }

    fn eps(&mut self, default: f64) -> CliResult<f64> {
        let eps = self.opts.eps.take().unwrap_or(default);
        check_eps(eps)?;
        self.note_num("eps", eps);
        Ok(eps)
    }

    fn start(&mut self) -> KeplerStart {
        let start = match self.opts.start.take() {
            Some(StartArg::Aphelion) => KeplerStart::Aphelion,
            _ => KeplerStart::Perihelion,
        };
        self.note("start", format!("{start:?}").to_lowercase());
        start
    }

    fn count(
        &mut self,
        key: &'static str,
        value: Option<u32>,
        default: u32,
        min: u32,
    ) -> CliResult<u32> {
        let n = value.unwrap_or(default);
        if n < min {
            return Err(CliError::usage(format!(
                "{key} must be at least {min}, got {n}"
            )));
        }
        self.note(key, n);
        Ok(n)
    }

    fn positive(&mut self, key: &'static str, value: Option<f64>, default: f64) -> CliResult<f64> {
        let x = value.unwrap_or(default);
        if !(x > 0.0 && x.is_finite()) {
            return Err(CliError::usage(format!(
                "{key} must be positive and finite, got {x}"
            )));
        }
        self.note_num(key, x);
        Ok(x)
    }

    fn n_per_rev(&mut self, default: u32) -> CliResult<u32> {
        let v = self.opts.n_per_rev.take();
        self.count("n_per_rev", v, default, 1)
    }

    fn periods(&mut self, default: f64) -> CliResult<f64> {
        let v = self.opts.periods.take();
        self.positive("periods", v, default)
    }

    fn lambda(&mut self) -> CliResult<f64> {
        let lambda = self.opts.lambda.take().unwrap_or(1.0);
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(CliError::usage(format!(
                "--lambda must lie in (0, 1], got {lambda}"
            )));
        }
        self.note_num("lambda", lambda);
        Ok(lambda)
    }

    fn rk2(&mut self, default: f64) -> CliResult<Rk2Params> {
        let a1 = self.opts.a1.take().unwrap_or(default);
        let params = Rk2Params::new(a1)?;
        self.note_num("a1", a1);
        Ok(params)
    }

    /// The integrator selected by `--method`, taking `--lambda` or `--a1`
    /// only when they apply to it.
    fn integrator(&mut self, method: MethodArg) -> CliResult<Integrator> {
        let integrator = match method {
            MethodArg::Alf => Integrator::Phi(Method::Alf {
                lambda: self.lambda()?,
            }),
            MethodArg::Dalf => Integrator::Phi(Method::Dalf),
            MethodArg::Adalf => Integrator::Phi(Method::Adalf),
            MethodArg::Rk2 => Integrator::Phi(Method::Rk2(self.rk2(0.0)?)),
            MethodArg::Lf => Integrator::ClassicLeapfrog,
            MethodArg::Sv => Integrator::StormerVerlet,
        };
        Ok(integrator)
    }

    fn single_integrator(&mut self) -> CliResult<Integrator> {
        let method = self.opts.method.take().unwrap_or(DEFAULT_METHOD);
        let integrator = self.integrator(method)?;
        self.note("method", integrator);
        Ok(integrator)
    }

    /// `--method` when given, else one of each of the six integrators.
    fn integrator_set(&mut self) -> CliResult<Vec<Integrator>> {
        if self.opts.method.is_some() {
            return Ok(vec![self.single_integrator()?]);
        }
        let lambda = self.lambda()?;
        let rk2 = self.rk2(0.0)?;
        let set = vec![
            Integrator::Phi(Method::Alf { lambda }),
            Integrator::Phi(Method::Dalf),
            Integrator::Phi(Method::Adalf),
            Integrator::ClassicLeapfrog,
            Integrator::Phi(Method::Rk2(rk2)),
            Integrator::StormerVerlet,
        ];
        self.note("methods", join(&set));
        Ok(set)
    }
}

fn join(set: &[Integrator]) -> String {
    set.iter().map(|i| i.name()).collect::<Vec<_>>().join(";")
}

fn check_eps(eps: f64) -> CliResult<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "eccentricity must lie in (0, 1), got {eps}"
        )))
    }
}

/// Step count covering `span` with steps `h`, the last one possibly
/// overshooting by less than a step.
fn steps_for(span: f64, h: f64) -> usize {
    (span / h - 1e-9).ceil().max(0.0) as usize
}

pub fn resolve(command: Command, opts: Options) -> CliResult<Resolved> {
    let mut r = Resolver {
        opts,
        meta: Vec::new(),
    };
    r.opts.out = None;
    let config = match command {
        Command::Trajectory => RunConfig::Trajectory(trajectory(&mut r)?),
        Command::Stability => RunConfig::Stability(stability(&mut r)?),
        Command::Order => RunConfig::Order(order(&mut r)?),
        Command::Nip => RunConfig::Nip(nip(&mut r)?),
        Command::Autostep => RunConfig::Autostep(autostep(&mut r)?),
        Command::KeplerExact => RunConfig::KeplerExact(kepler_exact(&mut r)?),
    };
    r.finish(command, config)
}

fn trajectory(r: &mut Resolver) -> CliResult<TrajectoryConfig> {
    let system_arg = r.opts.system.take().unwrap_or(SystemArg::Kepler);
    r.note("system", format!("{system_arg:?}").to_lowercase());
    let integrator = r.single_integrator()?;
    let controlled = r.opts.kink_crit.is_some() || r.opts.frac.is_some();

    let (system, t0, psi0, default_h, default_end) = match system_arg {
        SystemArg::Tanh => (SystemKind::Tanh, 0.0, vec![0.0], Some(0.1), 3.0),
        SystemArg::Arctan => (SystemKind::Arctan, 0.0, vec![0.0], Some(0.1), 3.0),
        SystemArg::Linear => {
            let w = r
                .opts
                .omega
                .take()
                .map_or(Complex64::new(-1.0, 0.0), |c| Complex64::new(c.re, c.im));
            r.note("omega", format!("{:?}:{:?}", w.re, w.im));
            (
                SystemKind::Linear { omega: w },
                0.0,
                vec![1.0, 0.0],
                Some(0.1),
                3.0,
            )
        }
        SystemArg::Kepler => {
            let eps = r.eps(0.15)?;
            let start = r.start();
            let s0 = start.state(eps);
            let tp = kepler::period(eps);
            let default_h = if r.opts.h.is_none() && !controlled {
                let n = r.n_per_rev(32)?;
                Some(tp / n as f64)
            } else {
                None
            };
            let default_end = if r.opts.t_end.is_none() {
                s0.t + r.periods(1.0)? * tp
            } else {
                f64::NAN
            };
            let kind = SystemKind::Kepler { eps, start };
            (kind, s0.t, vec![s0.x, s0.v], default_h, default_end)
        }
    };
    if integrator == Integrator::StormerVerlet && !system.is_kepler() {
        return Err(CliError::usage(
            "sv needs a second-order system (--system kepler)",
        ));
    }
    r.note_num("t0", t0);
    r.note(
        "psi0",
        psi0.iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(";"),
    );

    let t_end = r.opts.t_end.take().unwrap_or(default_end);
    if !(t_end > t0 && t_end.is_finite()) {
        return Err(CliError::usage(format!(
            "--t-end must exceed t0 = {t0}, got {t_end}"
        )));
    }
    r.note_num("t_end", t_end);

    let stepping = if controlled {
        if !matches!(integrator, Integrator::Phi(_)) {
            return Err(CliError::usage(format!(
                "step control needs a method that carries phi, not {integrator}"
            )));
        }
        let kink = r
            .opts
            .kink_crit
            .take()
            .unwrap_or(StepControlConfig::DEFAULT_KINK_CRIT);
        let frac = r
            .opts
            .frac
            .take()
            .unwrap_or(StepControlConfig::DEFAULT_FRAC);
        let mut cfg = StepControlConfig::for_interval(t0, t_end, kink, frac)?;
        if let Some(h) = r.opts.h.take() {
            cfg.h_init = h;
            cfg.validate()?;
        }
        r.note_num("kink_crit", kink);
        r.note_num("frac", frac);
        r.note_num("h_init", cfg.h_init);
        r.note_num("h_min", cfg.h_min);
        r.note_num("h_max", cfg.h_max);
        r.note("retry_cap", cfg.retry_cap);
        Stepping::Controlled { cfg, t_end }
    } else {
        let h = r.opts.h.take().or(default_h).unwrap_or(f64::NAN);
        let h = r.positive("h", Some(h), f64::NAN)?;
        let n_steps = steps_for(t_end - t0, h);
        r.note("steps", n_steps);
        Stepping::Fixed { h, n_steps }
    };

    let bezier = r.opts.bezier.take().unwrap_or(0);
    if bezier > 0 {
        if !matches!(integrator, Integrator::Phi(_)) {
            return Err(CliError::usage(format!(
                "--bezier needs a method that carries phi, not {integrator}"
            )));
        }
        r.note("bezier", bezier);
    }

    Ok(TrajectoryConfig {
        system,
        integrator,
        t0,
        psi0,
        stepping,
        bezier,
    })
}

fn stability(r: &mut Resolver) -> CliResult<StabilityConfig> {
    let method = match r.single_integrator()? {
        Integrator::Phi(m) => m,
        other => {
            return Err(CliError::usage(format!(
                "no propagation matrix for {other}"
            )))
        }
    };
    let w = r.opts.window.take();
    let window = match w {
        Some(w) => Window::new(w.re_min, w.re_max, w.im_min, w.im_max),
        None => Window::new(-3.0, 1.0, -2.0, 2.0),
    }
    .ok_or_else(|| CliError::usage("--window needs x0 < x1 and y0 < y1, all finite"))?;
    r.note(
        "window",
        format!(
            "{:?}:{:?}:{:?}:{:?}",
            window.re_min, window.re_max, window.im_min, window.im_max
        ),
    );
    let grid = r.opts.grid.take();
    let (nx, ny) = grid.map_or((201, 201), |g| (g.nx, g.ny));
    if nx < 2 || ny < 2 {
        return Err(CliError::usage(format!(
            "--grid needs at least 2:2, got {nx}:{ny}"
        )));
    }
    r.note("grid", format!("{nx}:{ny}"));
    Ok(StabilityConfig {
        method,
        window,
        nx,
        ny,
    })
}

fn order(r: &mut Resolver) -> CliResult<OrderConfig> {
    let integrators = r.integrator_set()?;
    let eps = r.eps(0.01)?;
    let n_per_rev = r.n_per_rev(32)?;
    let periods = r.opts.periods.take().unwrap_or(1.0);
    if !(periods >= 1.0 && periods.fract() == 0.0 && periods <= u32::MAX as f64) {
        return Err(CliError::usage(format!(
            "--periods must be a whole number for 'order', got {periods}"
        )));
    }
    r.note_num("periods", periods);
    let levels = r.opts.levels.take();
    let levels = r.count("levels", levels, 4, 3)?;
    r.note("refinement_factor", 2);
    Ok(OrderConfig {
        integrators,
        eps,
        n_per_rev,
        periods: periods as u32,
        levels,
    })
}

fn nip(r: &mut Resolver) -> CliResult<NipConfig> {
    let integrators = r.integrator_set()?;
    let eps = r.eps(0.15)?;
    let start = r.start();
    let n_per_rev = r.n_per_rev(32)?;
    let periods = r.periods(16.0)?;
    let n_steps = steps_for(periods * n_per_rev as f64, 1.0);
    r.note("steps", n_steps);
    Ok(NipConfig {
        integrators,
        eps,
        start,
        n_per_rev,
        n_steps,
    })
}

fn autostep(r: &mut Resolver) -> CliResult<AutostepConfig> {
    let integrators = if r.opts.method.is_some() {
        vec![r.single_integrator()?]
    } else {
        let rk2 = match r.opts.a1.is_some() {
            true => vec![Integrator::Phi(Method::Rk2(r.rk2(0.0)?))],
            false => [Rk2Params::MIDPOINT, Rk2Params::RALSTON, Rk2Params::HEUN]
                .map(|p| Integrator::Phi(Method::Rk2(p)))
                .to_vec(),
        };
        let mut set = vec![
            Integrator::Phi(Method::Dalf),
            Integrator::Phi(Method::Adalf),
        ];
        set.extend(rk2);
        r.note("methods", join(&set));
        set
    };
    if let Some(bad) = integrators
        .iter()
        .find(|i| !matches!(i, Integrator::Phi(_)))
    {
        return Err(CliError::usage(format!(
            "step control needs a method that carries phi, not {bad}"
        )));
    }
    let eps_values = match (r.opts.eps.take(), r.opts.eps_sweep.take()) {
        (Some(_), Some(_)) => return Err(CliError::usage("--eps and --eps-sweep are exclusive")),
        (Some(e), None) => {
            r.note_num("eps", e);
            vec![e]
        }
        (None, sweep) => {
            let (a, s, b) = sweep.map_or((0.05, 0.05, 0.95), |w| (w.start, w.step, w.end));
            r.note("eps_sweep", format!("{a:?}:{s:?}:{b:?}"));
            eps_sweep(a, s, b)?
        }
    };
    for &e in &eps_values {
        check_eps(e)?;
    }
    let periods = r.periods(1.0)?;
    let kink_crit = r
        .opts
        .kink_crit
        .take()
        .unwrap_or(StepControlConfig::DEFAULT_KINK_CRIT);
    let frac = r
        .opts
        .frac
        .take()
        .unwrap_or(StepControlConfig::DEFAULT_FRAC);
    // Catch bad thresholds before any run starts.
    StepControlConfig::for_interval(0.0, 1.0, kink_crit, frac)?;
    r.note_num("kink_crit", kink_crit);
    r.note_num("frac", frac);
    let n_per_rev = r.n_per_rev(10)?;
    Ok(AutostepConfig {
        integrators,
        eps_values,
        periods,
        kink_crit,
        frac,
        n_per_rev,
    })
}

fn kepler_exact(r: &mut Resolver) -> CliResult<KeplerExactConfig> {
    let eps = r.eps(0.15)?;
    let start = r.start();
    let n_per_rev = r.n_per_rev(32)?;
    let periods = r.periods(1.0)?;
    let n_samples = steps_for(periods * n_per_rev as f64, 1.0) + 1;
    r.note("samples", n_samples);
    Ok(KeplerExactConfig {
        eps,
        start,
        n_per_rev,
        n_samples,
    })
}
