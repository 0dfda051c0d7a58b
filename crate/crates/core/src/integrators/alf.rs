use crate::error::{Error, Result};
use crate::state::{PhaseState, StateVector};
use crate::system::{MechanicalSystem, OdeSystem};

use super::{check_state, check_step, finite_or_blow_up, Kick, StepOutcome};

/// Free drift `(t, psi, phi) -> (t + h, psi + h phi, phi)`.
pub fn drift(s: &mut PhaseState, h: f64) {
    s.t += h;
    s.psi.add_scaled(h, &s.phi);
}

/// Relaxed reflection of `phi` at the field value:
/// `phi -> phi + 2 lambda (F(t, psi) - phi)`. With `lambda = 1` this is
/// the map `phi -> 2F - phi`.
pub fn kick(sys: &OdeSystem, s: &mut PhaseState, lambda: f64) -> Result<Kick> {
    let field = sys.eval(s.t, &s.psi)?;
    let phi_before = s.phi.clone();
    let two_lambda = 2.0 * lambda;
    for (p, f) in s.phi.iter_mut().zip(field.iter()) {
        *p += two_lambda * (f - *p);
    }
    Ok(Kick {
        field,
        phi_before,
        phi_after: s.phi.clone(),
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "relaxation parameter must lie in (0, 1]",
        });
    }
    Ok(())
}

/// One asynchronous leapfrog step: half drift, kick at the midpoint, half
/// drift. One right-hand side evaluation.
pub fn alf_step(sys: &OdeSystem, s: &PhaseState, h: f64, lambda: f64) -> Result<StepOutcome> {
    check_step(h)?;
    check_lambda(lambda)?;
    check_state(sys.dim(), s)?;
    let tau = 0.5 * h;
    let mut next = s.clone();
    drift(&mut next, tau);
    let k = kick(sys, &mut next, lambda)?;
    next.psi.add_scaled(tau, &next.phi);
    next.t = s.t + h;
    Ok(StepOutcome {
        state: finite_or_blow_up(next)?,
        kicks: vec![k],
        fevals: 1,
    })
}

/// The two kicks of the double step, leaving `psi` and `t` final.
///
/// The inner drifts are kept as two quarter drifts rather than merged into
/// one half drift, so the result agrees bit for bit with two ALF half-steps.
fn densified(sys: &OdeSystem, s: &PhaseState, h: f64) -> Result<(PhaseState, Kick, Kick)> {
    check_step(h)?;
    check_state(sys.dim(), s)?;
    let half = 0.5 * h;
    let quarter = 0.5 * half;
    let mut next = s.clone();
    drift(&mut next, quarter);
    let first = kick(sys, &mut next, 1.0)?;
    next.psi.add_scaled(quarter, &next.phi);
    next.t = s.t + half;
    drift(&mut next, quarter);
    let second = kick(sys, &mut next, 1.0)?;
    next.psi.add_scaled(quarter, &next.phi);
    next.t = s.t + h;
    Ok((next, first, second))
}

/// Densified step: two ALF half-steps.
/// Two right-hand side evaluations.
pub fn dalf_step(sys: &OdeSystem, s: &PhaseState, h: f64) -> Result<StepOutcome> {
    let (next, first, second) = densified(sys, s, h)?;
    Ok(StepOutcome {
        state: finite_or_blow_up(next)?,
        kicks: vec![first, second],
        fevals: 2,
    })
}

/// Averaged densified step: positions as in [`dalf_step`], final `phi`
/// replaced by the mean of the two post-kick values.
pub fn adalf_step(sys: &OdeSystem, s: &PhaseState, h: f64) -> Result<StepOutcome> {
    let (mut next, first, second) = densified(sys, s, h)?;
    for (p, p1) in next.phi.iter_mut().zip(first.phi_after.iter()) {
        *p = 0.5 * (*p + p1);
    }
    Ok(StepOutcome {
        state: finite_or_blow_up(next)?,
        kicks: vec![first, second],
        fevals: 2,
    })
}

/// State of a mechanical system for [`adalf2_step`]: position `x`,
/// velocity `v`, and their carried derivatives `w` (for `x`) and `a`
/// (for `v`).
#[derive(Debug, Clone, PartialEq)]
pub struct MechanicalState {
    pub t: f64,
    pub x: StateVector,
    pub v: StateVector,
    pub w: StateVector,
    pub a: StateVector,
}

impl MechanicalState {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.x.is_finite()
            && self.v.is_finite()
            && self.w.is_finite()
            && self.a.is_finite()
    }
}

/// `w = v0`, `a = F(t0, x0, v0)`.
pub fn init_mechanical_state(
    sys: &MechanicalSystem,
    t0: f64,
    x0: impl Into<StateVector>,
    v0: impl Into<StateVector>,
) -> Result<MechanicalState> {
    let x = x0.into();
    let v = v0.into();
    let a = sys.eval(t0, &x, &v)?;
    Ok(MechanicalState {
        t: t0,
        w: v.clone(),
        x,
        v,
        a,
    })
}

fn drift2(x: &mut StateVector, v: &mut StateVector, w: &[f64], a: &[f64], dt: f64) {
    x.add_scaled(dt, w);
    v.add_scaled(dt, a);
}

fn kick2(sys: &MechanicalSystem, t: f64, s: &mut MechanicalState) -> Result<()> {
    let force = sys.eval(t, &s.x, &s.v)?;
    for (w, v) in s.w.iter_mut().zip(s.v.iter()) {
        *w += 2.0 * (v - *w);
    }
    for (a, f) in s.a.iter_mut().zip(force.iter()) {
        *a += 2.0 * (f - *a);
    }
    Ok(())
}

/// [`adalf_step`] written out for `x'' = F(t, x, x')` with the velocity
/// split into its own components. Two force evaluations.
pub fn adalf2_step(sys: &MechanicalSystem, s: &MechanicalState, h: f64) -> Result<MechanicalState> {
    check_step(h)?;
    let quarter = 0.25 * h;
    let half = 0.5 * h;
    let mut n = s.clone();
    drift2(&mut n.x, &mut n.v, &s.w, &s.a, quarter);
    kick2(sys, s.t + quarter, &mut n)?;
    let w1 = n.w.clone();
    let a1 = n.a.clone();
    drift2(&mut n.x, &mut n.v, &n.w, &n.a, half);
    kick2(sys, s.t + 3.0 * quarter, &mut n)?;
    drift2(&mut n.x, &mut n.v, &n.w, &n.a, quarter);
    for (w, w1) in n.w.iter_mut().zip(w1.iter()) {
        *w = 0.5 * (*w + w1);
    }
    for (a, a1) in n.a.iter_mut().zip(a1.iter()) {
        *a = 0.5 * (*a + a1);
    }
    n.t = s.t + h;
    if n.is_finite() {
        Ok(n)
    } else {
        Err(Error::BlowUp { t: n.t })
    }
}
