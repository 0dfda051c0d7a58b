//! Right-hand sides of ordinary differential equations.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::state::StateVector;

type RhsFn = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;
type ForceFn = dyn Fn(f64, &[f64], &[f64], &mut [f64]) + Send + Sync;

/// First-order system `psi' = F(t, psi)`.
///
/// Every evaluation through [`OdeSystem::eval`] is counted. Clones share
/// the counter.
#[derive(Clone)]
pub struct OdeSystem {
    label: String,
    dim: usize,
    rhs: Arc<RhsFn>,
    evaluations: Arc<AtomicU64>,
}

impl OdeSystem {
    /// `rhs(t, psi, out)` must write `F(t, psi)` into `out`. It must be
    /// deterministic and reentrant.
    pub fn new<F>(label: impl Into<String>, dim: usize, rhs: F) -> Self
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        assert!(dim > 0, "system dimension must be positive");
        OdeSystem {
            label: label.into(),
            dim,
            rhs: Arc::new(rhs),
            evaluations: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of right-hand side evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn reset_evaluations(&self) {
        self.evaluations.store(0, Ordering::Relaxed);
    }

    /// Evaluates `F(t, psi)`; a non-finite component is reported as blow-up.
    pub fn eval(&self, t: f64, psi: &[f64]) -> Result<StateVector> {
        if psi.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: psi.len(),
            });
        }
        let mut out = StateVector::zeros(self.dim);
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        (self.rhs)(t, psi, &mut out);
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::BlowUp { t })
        }
    }
}

impl fmt::Debug for OdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeSystem")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("evaluations", &self.evaluations())
            .finish()
    }
}

/// Second-order system `q'' = A(t, q)` with a velocity-independent
/// acceleration.
#[derive(Clone)]
pub struct SecondOrderSystem {
    label: String,
    dim: usize,
    accel: Arc<RhsFn>,
    evaluations: Arc<AtomicU64>,
}

impl SecondOrderSystem {
    pub fn new<F>(label: impl Into<String>, dim: usize, accel: F) -> Self
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        assert!(dim > 0, "system dimension must be positive");
        SecondOrderSystem {
            label: label.into(),
            dim,
            accel: Arc::new(accel),
            evaluations: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn eval(&self, t: f64, q: &[f64]) -> Result<StateVector> {
        if q.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: q.len(),
            });
        }
        let mut out = StateVector::zeros(self.dim);
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        (self.accel)(t, q, &mut out);
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::BlowUp { t })
        }
    }
}

impl fmt::Debug for SecondOrderSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecondOrderSystem")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .finish()
    }
}

/// Second-order system `x'' = F(t, x, x')` whose force may depend on the
/// velocity.
#[derive(Clone)]
pub struct MechanicalSystem {
    label: String,
    dim: usize,
    force: Arc<ForceFn>,
    evaluations: Arc<AtomicU64>,
}

impl MechanicalSystem {
    pub fn new<F>(label: impl Into<String>, dim: usize, force: F) -> Self
    where
        F: Fn(f64, &[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        assert!(dim > 0, "system dimension must be positive");
        MechanicalSystem {
            label: label.into(),
            dim,
            force: Arc::new(force),
            evaluations: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn eval(&self, t: f64, x: &[f64], v: &[f64]) -> Result<StateVector> {
        if x.len() != self.dim || v.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: if x.len() != self.dim {
                    x.len()
                } else {
                    v.len()
                },
            });
        }
        let mut out = StateVector::zeros(self.dim);
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        (self.force)(t, x, v, &mut out);
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::BlowUp { t })
        }
    }

    /// The equivalent first-order system on `psi = (x, v)`.
    pub fn to_first_order(&self) -> OdeSystem {
        let force = Arc::clone(&self.force);
        let n = self.dim;
        OdeSystem::new(
            format!("{} (first order)", self.label),
            2 * n,
            move |t, psi, out| {
                let (x, v) = psi.split_at(n);
                let (dx, dv) = out.split_at_mut(n);
                dx.copy_from_slice(v);
                force(t, x, v, dv);
            },
        )
    }
}

impl fmt::Debug for MechanicalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MechanicalSystem")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .finish()
    }
}
