use crate::error::Result;
use crate::state::PhaseState;
use crate::system::SecondOrderSystem;

use super::{check_state, check_step, finite_or_blow_up, StepOutcome};

/// Position Verlet (direct midpoint) step for `psi'' = A(t, psi)` with
/// `phi = psi'`: half drift, full velocity kick with the midpoint
/// acceleration, half drift. One acceleration evaluation.
pub fn stormer_verlet_step(sys: &SecondOrderSystem, s: &PhaseState, h: f64) -> Result<StepOutcome> {
    check_step(h)?;
    check_state(sys.dim(), s)?;
    let tau = 0.5 * h;
    let mid = s.psi.scaled_sum(tau, &s.phi);
    let acc = sys.eval(s.t + tau, &mid)?;
    let phi = s.phi.scaled_sum(h, &acc);
    let psi = mid.scaled_sum(tau, &phi);
    Ok(StepOutcome {
        state: finite_or_blow_up(PhaseState {
            t: s.t + h,
            psi,
            phi,
        })?,
        kicks: Vec::new(),
        fevals: 1,
    })
}
