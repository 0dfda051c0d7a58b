//! Command-line surface. Every option is global so it may appear before or
//! after the subcommand; [`crate::config`] decides which ones a command uses.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "asyncleap",
    version,
    about = "Asynchronous leapfrog experiments with CSV output"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// One run, one row per accepted step.
    Trajectory,
    /// Absolute-stability membership on a grid of z = h omega.
    Stability,
    /// Mean Kepler error against step size, with the fitted order.
    Order,
    /// Numerical interaction picture of Kepler runs.
    Nip,
    /// Controlled-step runs over an eccentricity sweep, with fixed-step
    /// baselines.
    Autostep,
    /// Samples of the exact Kepler-oscillator solution.
    KeplerExact,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Trajectory => "trajectory",
            Command::Stability => "stability",
            Command::Order => "order",
            Command::Nip => "nip",
            Command::Autostep => "autostep",
            Command::KeplerExact => "kepler-exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Alf,
    Dalf,
    Adalf,
    Lf,
    Rk2,
    Sv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Tanh,
    Arctan,
    Linear,
    Kepler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StartArg {
    Perihelion,
    Aphelion,
}

/// `a:s:b`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepArg {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

/// `x0:x1:y0:y1`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowArg {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

/// `nx:ny`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridArg {
    pub nx: usize,
    pub ny: usize,
}

/// `re:im`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// RK2 weight a1 in [0, 1): 0 midpoint, 1/3 Ralston, 1/2 Heun.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    /// ALF relaxation in (0, 1].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub system: Option<SystemArg>,
    /// Kepler eccentricity in (0, 1).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Eccentricity sweep `a:s:b`.
    #[arg(long, global = true, value_parser = parse_sweep, allow_hyphen_values = true)]
    pub eps_sweep: Option<SweepArg>,
    /// Fixed step size, or the first trial step of a controlled run.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Steps (or samples) per Kepler revolution.
    #[arg(long, global = true)]
    pub n_per_rev: Option<u32>,
    /// Number of Kepler revolutions.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub periods: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    /// Stability window `x0:x1:y0:y1` in the z plane.
    #[arg(long, global = true, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<WindowArg>,
    /// Stability grid resolution `nx:ny`.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<GridArg>,
    /// Jerk threshold above which a step is rejected; enables step control
    /// for `trajectory`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kink_crit: Option<f64>,
    /// Growth band as a fraction of the jerk threshold.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub frac: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Eigenvalue `re:im` of the linear test system.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega: Option<ComplexArg>,
    /// Kepler starting turning point.
    #[arg(long, global = true, value_enum)]
    pub start: Option<StartArg>,
    /// Bezier samples per step appended to trajectory rows.
    #[arg(long, global = true)]
    pub bezier: Option<usize>,
    /// Number of step-size halvings in the order study.
    #[arg(long, global = true)]
    pub levels: Option<u32>,
}

fn parse_fields<const N: usize>(s: &str, shape: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != N {
        return Err(format!("expected {shape}, got '{s}'"));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("'{part}' is not a number in '{s}'"))?;
    }
    Ok(out)
}

fn parse_sweep(s: &str) -> Result<SweepArg, String> {
    let [start, step, end] = parse_fields(s, "a:s:b")?;
    Ok(SweepArg { start, step, end })
}

fn parse_window(s: &str) -> Result<WindowArg, String> {
    let [re_min, re_max, im_min, im_max] = parse_fields(s, "x0:x1:y0:y1")?;
    Ok(WindowArg {
        re_min,
        re_max,
        im_min,
        im_max,
    })
}

fn parse_complex(s: &str) -> Result<ComplexArg, String> {
    let [re, im] = parse_fields(s, "re:im")?;
    Ok(ComplexArg { re, im })
}

fn parse_grid(s: &str) -> Result<GridArg, String> {
    let (nx, ny) = s
        .split_once(':')
        .ok_or_else(|| format!("expected nx:ny, got '{s}'"))?;
    let parse = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|_| format!("'{p}' is not a count"))
    };
    Ok(GridArg {
        nx: parse(nx)?,
        ny: parse(ny)?,
    })
}
