use crate::error::{Error, Result};
use crate::state::PhaseState;
use crate::system::OdeSystem;

use super::{check_state, check_step, finite_or_blow_up, StepOutcome};

/// Parameter of the one-parameter family of explicit second-order
/// Runge-Kutta methods.
///
/// `a1 = 0` is the midpoint method, `1/3` Ralston's and `1/2` Heun's.
/// The tableau is recovered as weights `(a1, 1 - a1)` and stage node
/// `c = 1 / (2 (1 - a1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk2Params {
    a1: f64,
}

impl Rk2Params {
    pub const MIDPOINT: Rk2Params = Rk2Params { a1: 0.0 };
    pub const RALSTON: Rk2Params = Rk2Params { a1: 1.0 / 3.0 };
    pub const HEUN: Rk2Params = Rk2Params { a1: 0.5 };

    pub fn new(a1: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&a1) {
            return Err(Error::InvalidParameter {
                name: "a1",
                value: a1,
                reason: "must lie in [0, 1)",
            });
        }
        Ok(Rk2Params { a1 })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn weight(&self) -> f64 {
        1.0 - self.a1
    }

    pub fn node(&self) -> f64 {
        0.5 / (1.0 - self.a1)
    }
}

/// Second-order Runge-Kutta step on a `phi`-carrying state.
///
/// The first stage reuses the stored `phi` instead of evaluating the field;
/// the step ends by refreshing `phi = F(t + h, psi_new)`. Two evaluations.
pub fn rk2_step(sys: &OdeSystem, s: &PhaseState, h: f64, p: Rk2Params) -> Result<StepOutcome> {
    check_step(h)?;
    check_state(sys.dim(), s)?;
    let c = p.node();
    let b = p.weight();
    let stage = s.psi.scaled_sum(c * h, &s.phi);
    let k2 = sys.eval(s.t + c * h, &stage)?;
    let mut psi = s.psi.clone();
    for ((y, f0), f1) in psi.iter_mut().zip(s.phi.iter()).zip(k2.iter()) {
        *y += h * (p.a1 * f0 + b * f1);
    }
    let t = s.t + h;
    let phi = sys.eval(t, &psi)?;
    Ok(StepOutcome {
        state: finite_or_blow_up(PhaseState { t, psi, phi })?,
        kicks: Vec::new(),
        fevals: 2,
    })
}
