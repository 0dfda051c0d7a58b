//! The Kepler oscillator: radial motion on a bound Kepler orbit in units
//! where the orbiting mass, `GM` and the angular momentum are all 1.
//!
//! ```text
//! x' = v,    v' = (1/x^2) (1/x - 1)
//! H(v, x) = v^2/2 + (1/x) (1/(2x) - 1)
//! ```
//!
//! Bound orbits (`H < 0`) are propagated exactly through Kepler's equation,
//! at a cost independent of the time span and for either direction of time.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default accuracy for [`solve_kepler_equation`].
pub const DEFAULT_ACC: f64 = 1e-12;

/// Iteration cap of the Kepler-equation solver.
pub const MAX_KEPLER_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerState {
    pub t: f64,
    /// Radius.
    pub x: f64,
    /// Radial velocity.
    pub v: f64,
}

impl KeplerState {
    pub fn new(t: f64, x: f64, v: f64) -> Self {
        KeplerState { t, x, v }
    }

    pub fn energy(&self) -> Result<f64> {
        hamiltonian(self.v, self.x)
    }
}

/// Orbital elements of a bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerElements {
    /// Major semi-axis.
    pub a: f64,
    /// Numerical eccentricity.
    pub eps: f64,
    /// Mean motion.
    pub n: f64,
    /// Eccentric anomaly at the reference time.
    pub e_anomaly: f64,
    /// Mean anomaly at the reference time.
    pub m_anomaly: f64,
    pub energy: f64,
}

/// `V(x) = (1/x)(1/(2x) - 1)`, minimal at `x = 1` with `V(1) = -1/2`.
pub fn potential(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            what: "Kepler potential",
            value: x,
        });
    }
    Ok((1.0 / x) * (0.5 / x - 1.0))
}

pub fn hamiltonian(v: f64, x: f64) -> Result<f64> {
    Ok(0.5 * v * v + potential(x)?)
}

/// Right-hand side `[v, (1/x^2)(1/x - 1)]`.
pub fn kepler_rhs(_t: f64, psi: &[f64]) -> Result<[f64; 2]> {
    let (x, v) = (psi[0], psi[1]);
    if !(x > 0.0) {
        return Err(Error::Domain {
            what: "Kepler oscillator",
            value: x,
        });
    }
    Ok([v, kepler_accel(x)])
}

pub(crate) fn kepler_accel(x: f64) -> f64 {
    (1.0 / (x * x)) * (1.0 / x - 1.0)
}

/// Solves `E = M + eps sin E` by the averaged fixed-point iteration
///
/// ```text
/// x1 = M + eps sin(x),  x2 = M + eps sin(x1),  x <- (x1 + x2) / 2
/// ```
///
/// until two successive iterates differ by at most `acc`.
pub fn solve_kepler_equation(mean_anomaly: f64, eps: f64, acc: f64) -> Result<f64> {
    if !(acc > 0.0) {
        return Err(Error::InvalidParameter {
            name: "acc",
            value: acc,
            reason: "accuracy must be positive",
        });
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "eccentricity must lie in [0, 1)",
        });
    }
    let m = mean_anomaly;
    let mut old = m + 1000.0;
    let mut new = m;
    let mut iterations = 0;
    while (old - new).abs() > acc {
        if iterations == MAX_KEPLER_ITERATIONS {
            return Err(Error::KeplerNonConvergence {
                mean_anomaly: m,
                eps,
            });
        }
        old = new;
        let x1 = m + eps * new.sin();
        let x2 = m + eps * x1.sin();
        new = (x1 + x2) * 0.5;
        iterations += 1;
    }
    Ok(new)
}

pub fn elements_from_state(s: &KeplerState) -> Result<KeplerElements> {
    let energy = s.energy()?;
    if energy >= 0.0 {
        return Err(Error::UnboundOrbit { energy });
    }
    let a = -0.5 / energy;
    let eps = (1.0 - 1.0 / a).max(0.0).sqrt();
    let n = a.powf(-1.5);
    let z_re = 1.0 - s.x / a;
    let z_im = s.x * s.v / a.sqrt();
    let e_anomaly = z_im.atan2(z_re);
    let m_anomaly = e_anomaly - eps * e_anomaly.sin();
    Ok(KeplerElements {
        a,
        eps,
        n,
        e_anomaly,
        m_anomaly,
        energy,
    })
}

/// A bound orbit anchored at a reference state, ready for repeated exact
/// propagation.
#[derive(Debug, Clone, Copy)]
pub struct KeplerOrbit {
    reference: KeplerState,
    elements: KeplerElements,
    acc: f64,
}

impl KeplerOrbit {
    pub fn new(reference: KeplerState, acc: f64) -> Result<Self> {
        Ok(KeplerOrbit {
            elements: elements_from_state(&reference)?,
            reference,
            acc,
        })
    }

    pub fn elements(&self) -> &KeplerElements {
        &self.elements
    }

    pub fn reference(&self) -> &KeplerState {
        &self.reference
    }

    /// Tolerance used when solving Kepler's equation.
    pub fn acc(&self) -> f64 {
        self.acc
    }

    /// Exact state at time `t`.
    pub fn state_at(&self, t: f64) -> Result<KeplerState> {
        let KeplerElements {
            a,
            eps,
            n,
            m_anomaly,
            ..
        } = self.elements;
        let m1 = m_anomaly + (t - self.reference.t) * n;
        let e1 = solve_kepler_equation(m1, eps, self.acc)?;
        let x = a * (1.0 - eps * e1.cos());
        let v = eps * a * a * n * e1.sin() / x;
        Ok(KeplerState { t, x, v })
    }
}

/// Exact state at `t1` on the orbit through `s`.
pub fn exact_evolve(s: &KeplerState, t1: f64, acc: f64) -> Result<KeplerState> {
    KeplerOrbit::new(*s, acc)?.state_at(t1)
}

/// Radial oscillation period `2 pi (1 - eps^2)^(-3/2)`.
pub fn period(eps: f64) -> f64 {
    2.0 * PI * (1.0 - eps * eps).powf(-1.5)
}

/// Innermost point of the orbit with eccentricity `eps`, at `t = 0`.
pub fn perihelion_state(eps: f64) -> KeplerState {
    KeplerState::new(0.0, 1.0 / (1.0 + eps), 0.0)
}

/// Outermost point of the orbit with eccentricity `eps`, at `t = 0`.
pub fn aphelion_state(eps: f64) -> KeplerState {
    KeplerState::new(0.0, 1.0 / (1.0 - eps), 0.0)
}

/// `(x_min, x_max)`, the roots of `V(x) = H0` with `H0 = (eps^2 - 1)/2`.
pub fn x_range(eps: f64) -> (f64, f64) {
    (1.0 / (1.0 + eps), 1.0 / (1.0 - eps))
}

/// `v_max = -v_min`, from `v^2/2 - 1/2 = H0`, which gives `v_max = eps`.
pub fn v_extreme(eps: f64) -> f64 {
    eps
}

/// Steps per revolution that keep a fixed-step run on an orbit of
/// eccentricity `eps` as demanding as `n_per_rev0` steps on the circular
/// orbit: `n0 sqrt((1 + eps)/(1 - eps)) / (1 - eps)`, rounded up.
pub fn steps_per_rev(eps: f64, n_per_rev0: u32) -> u32 {
    let factor = ((1.0 + eps) / (1.0 - eps)).sqrt() / (1.0 - eps);
    (n_per_rev0 as f64 * factor).ceil() as u32
}
