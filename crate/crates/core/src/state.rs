//! State values shared by all integrators.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::system::OdeSystem;

/// A point of the real finite-dimensional state space.
///
/// Complex-valued problems are embedded as interleaved real components,
/// so one representation serves every stepper.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(components: Vec<f64>) -> Self {
        StateVector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        StateVector(vec![0.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        vector_norm(&self.0)
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, factor: f64, other: &[f64]) {
        debug_assert_eq!(self.0.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(other) {
            *a += factor * b;
        }
    }

    /// `self + factor * other` as a new vector.
    pub fn scaled_sum(&self, factor: f64, other: &[f64]) -> StateVector {
        let mut out = self.clone();
        out.add_scaled(factor, other);
        out
    }

    pub fn distance(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Deref for StateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for StateVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(v)
    }
}

impl From<&[f64]> for StateVector {
    fn from(v: &[f64]) -> Self {
        StateVector(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for StateVector {
    fn from(v: [f64; N]) -> Self {
        StateVector(v.to_vec())
    }
}

/// Euclidean norm of a slice, without overflow for large components.
pub fn vector_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, &c| acc.hypot(c))
}

/// One point of an asynchronous-leapfrog trajectory: time, position `psi`
/// and the carried derivative estimate `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub psi: StateVector,
    pub phi: StateVector,
}

impl PhaseState {
    pub fn new(t: f64, psi: impl Into<StateVector>, phi: impl Into<StateVector>) -> Self {
        PhaseState {
            t,
            psi: psi.into(),
            phi: phi.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.psi.is_finite() && self.phi.is_finite()
    }

    /// Distance to `other` in the combined `(psi, phi)` space.
    pub fn distance(&self, other: &PhaseState) -> f64 {
        let dp = self.psi.distance(&other.psi);
        let df = self.phi.distance(&other.phi);
        (dp * dp + df * df).sqrt()
    }

    /// Norm of the combined `(psi, phi)` vector.
    pub fn norm(&self) -> f64 {
        let p = self.psi.norm();
        let f = self.phi.norm();
        (p * p + f * f).sqrt()
    }
}

/// Start state with `phi` set to the exact field value at `(t0, psi0)`.
///
/// Costs exactly one right-hand side evaluation.
pub fn init_phase_state(
    sys: &OdeSystem,
    t0: f64,
    psi0: impl Into<StateVector>,
) -> Result<PhaseState> {
    let psi0 = psi0.into();
    if psi0.len() != sys.dim() {
        return Err(Error::Dimension {
            expected: sys.dim(),
            found: psi0.len(),
        });
    }
    let phi0 = sys.eval(t0, &psi0)?;
    Ok(PhaseState {
        t: t0,
        psi: psi0,
        phi: phi0,
    })
}
