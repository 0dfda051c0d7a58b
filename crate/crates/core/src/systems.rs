//! Test problems packaged as [`OdeSystem`] values.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kepler;
use crate::system::{OdeSystem, SecondOrderSystem};

/// `psi' = 1 - psi^2`; from `psi(0) = 0` the solution is `tanh t`.
pub fn tanh_system() -> OdeSystem {
    OdeSystem::new("tanh", 1, |_, y, out| out[0] = 1.0 - y[0] * y[0])
}

/// Exact solution of [`tanh_system`] through `(t0, psi0)`:
/// `tanh(t - t0 + artanh psi0)`.
pub fn tanh_exact(t0: f64, psi0: f64) -> Result<impl Fn(f64) -> f64> {
    if !(psi0.abs() < 1.0) {
        return Err(Error::Domain {
            what: "tanh solution (|psi0| < 1)",
            value: psi0,
        });
    }
    let shift = psi0.atanh() - t0;
    Ok(move |t: f64| (t + shift).tanh())
}

/// `psi' = 1 + psi^2`; from `psi(0) = 0` the solution `tan t` escapes at
/// `t = pi/2`.
pub fn arctan_blowup_system() -> OdeSystem {
    OdeSystem::new("arctan", 1, |_, y, out| out[0] = 1.0 + y[0] * y[0])
}

/// Exact solution of [`arctan_blowup_system`] from `psi(0) = 0`.
pub fn arctan_exact(t: f64) -> f64 {
    t.tan()
}

/// `psi' = omega psi` for complex `psi = re + i im`, stored as `[re, im]`.
pub fn linear_test_system(omega: Complex64) -> OdeSystem {
    OdeSystem::new(format!("linear(omega={omega})"), 2, move |_, y, out| {
        let w = omega * Complex64::new(y[0], y[1]);
        out[0] = w.re;
        out[1] = w.im;
    })
}

/// The Kepler oscillator on `psi = [x, v]`. Evaluations at `x <= 0`
/// produce NaN and are therefore reported as blow-up.
pub fn kepler_system() -> OdeSystem {
    OdeSystem::new("kepler", 2, |t, y, out| match kepler::kepler_rhs(t, y) {
        Ok(f) => out.copy_from_slice(&f),
        Err(_) => out.fill(f64::NAN),
    })
}

/// The Kepler oscillator as `x'' = (1/x^2)(1/x - 1)`.
pub fn kepler_accel() -> SecondOrderSystem {
    SecondOrderSystem::new("kepler", 1, |_, q, out| {
        out[0] = if q[0] > 0.0 {
            kepler::kepler_accel(q[0])
        } else {
            f64::NAN
        }
    })
}
