//! Linear stability on the test equation `psi' = omega psi`, `omega` complex.
//!
//! Every `phi`-carrying stepper maps `(psi, phi)` linearly on this equation,
//! so one step is a complex 2x2 propagation matrix
//!
//! ```text
//! (psi_new)   (alpha  beta ) (psi)
//! (phi_new) = (gamma  delta) (phi)
//! ```
//!
//! [`propagation_matrix_numeric`] extracts it by stepping the basis states;
//! [`closed_form`] holds the algebraic matrices and eigenvalues for
//! cross-checking. A point `z = h omega` belongs to the set of absolute
//! stability when both eigenvalues have modulus at most one.
//!
//! For ADALF the published off-diagonal entries do not follow from the
//! step as written (the step gives `beta = h^3 omega^2 / 8` and
//! `gamma = omega (1 + h omega)`); their product, the trace and the
//! determinant agree, so the eigenvalues are unaffected. Region
//! computations for ADALF therefore use the extracted matrix.

use num_complex::Complex64;

use crate::integrators::Method;
use crate::state::PhaseState;
use crate::systems::linear_test_system;

pub type ComplexNumber = Complex64;

/// Slack on `|lambda| <= 1` for rounding in eigenvalues that sit on the
/// unit circle (leapfrog methods on the imaginary axis).
pub const UNIT_CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationMatrix {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl PropagationMatrix {
    pub const IDENTITY: PropagationMatrix = PropagationMatrix {
        alpha: Complex64::new(1.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
        gamma: Complex64::new(0.0, 0.0),
        delta: Complex64::new(1.0, 0.0),
    };

    pub fn trace(&self) -> Complex64 {
        self.alpha + self.delta
    }

    pub fn determinant(&self) -> Complex64 {
        self.alpha * self.delta - self.beta * self.gamma
    }

    pub fn apply(&self, psi: Complex64, phi: Complex64) -> (Complex64, Complex64) {
        (
            self.alpha * psi + self.beta * phi,
            self.gamma * psi + self.delta * phi,
        )
    }

    pub fn max_entry_distance(&self, other: &PropagationMatrix) -> f64 {
        [
            self.alpha - other.alpha,
            self.beta - other.beta,
            self.gamma - other.gamma,
            self.delta - other.delta,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }
}

fn complex_of(v: &[f64]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// One step of `method` on the linear test equation, applied to the basis
/// states `(1, 0)` and `(0, 1)`. Panics unless `h` is positive and finite.
pub fn propagation_matrix_numeric(method: Method, h: f64, omega: Complex64) -> PropagationMatrix {
    assert!(h > 0.0 && h.is_finite(), "step size must be positive");
    let sys = linear_test_system(omega);
    let column = |psi: [f64; 2], phi: [f64; 2]| {
        let s = PhaseState::new(0.0, psi, phi);
        let out = method
            .step(&sys, &s, h)
            .expect("linear test equation stays finite for finite input");
        (complex_of(&out.state.psi), complex_of(&out.state.phi))
    };
    let (alpha, gamma) = column([1.0, 0.0], [0.0, 0.0]);
    let (beta, delta) = column([0.0, 0.0], [1.0, 0.0]);
    PropagationMatrix {
        alpha,
        beta,
        gamma,
        delta,
    }
}

/// Roots of `lambda^2 - tr lambda + det`.
pub fn eigenvalues(m: &PropagationMatrix) -> (Complex64, Complex64) {
    let tr = m.trace();
    let det = m.determinant();
    let root = (tr * tr - 4.0 * det).sqrt();
    ((tr + root) * 0.5, (tr - root) * 0.5)
}

pub fn spectral_radius(m: &PropagationMatrix) -> f64 {
    let (a, b) = eigenvalues(m);
    a.norm().max(b.norm())
}

/// Splits `z = h omega` into `h = |z|` and `omega = z / |z|`.
fn split(z: Complex64) -> (f64, Complex64) {
    let h = z.norm();
    (h, z / h)
}

/// Eigenvalues of `method` at `z`, from closed forms where they exist and
/// from the extracted matrix otherwise.
pub fn eigenvalues_at(method: Method, z: Complex64) -> (Complex64, Complex64) {
    match method {
        Method::Alf { lambda: 1.0 } => closed_form::ev_alf(z),
        Method::Dalf => closed_form::ev_dalf(z),
        Method::Rk2(_) => closed_form::ev_rk2(z),
        _ => {
            let (h, omega) = if z == Complex64::new(0.0, 0.0) {
                (1.0, z)
            } else {
                split(z)
            };
            eigenvalues(&propagation_matrix_numeric(method, h, omega))
        }
    }
}

pub fn is_absolutely_stable(method: Method, z: Complex64) -> bool {
    if z == Complex64::new(0.0, 0.0) {
        return true;
    }
    match method {
        // Tangent to the unit circle to fourth order on the imaginary axis,
        // so a rounding slack would move the boundary; use the exact margin.
        Method::Rk2(_) => closed_form::rk2_margin(z) <= 0.0,
        // One eigenvalue leaves the disk only to second order near the
        // origin; a slack would fake a stable sliver of width ~1e-6.
        Method::Alf { lambda } if lambda != 1.0 => {
            let (trace, det) = closed_form::alf_relaxed_trace_det(z, lambda);
            roots_in_closed_disk(trace, det)
        }
        _ => {
            let (a, b) = eigenvalues_at(method, z);
            a.norm().max(b.norm()) <= 1.0 + UNIT_CIRCLE_TOL
        }
    }
}

/// Whether both roots of `mu^2 - trace mu + det` lie in the closed unit
/// disk, for real `|det| < 1` (Schur-Cohn test, no eigenvalues needed).
fn roots_in_closed_disk(trace: Complex64, det: f64) -> bool {
    debug_assert!(det.abs() < 1.0);
    let w = trace - trace.conj() * det;
    let bound = 1.0 - det * det;
    w.norm_sqr() <= bound * bound
}

/// Upper end of the stable segment `[0, i c]` of the imaginary axis.
///
/// The axis is sampled upward from zero until the first unstable point,
/// and the transition is then bisected down to `tol`. Returns 0 when the
/// method is unstable immediately above the origin.
pub fn imaginary_axis_boundary(method: Method, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    const SAMPLE: f64 = 1e-3;
    const LIMIT: f64 = 16.0;
    let stable = |c: f64| is_absolutely_stable(method, Complex64::new(0.0, c));
    let mut lo = 0.0;
    let mut hi = SAMPLE;
    while stable(hi) {
        lo = hi;
        hi += SAMPLE;
        if hi > LIMIT {
            return LIMIT;
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        0.0
    } else {
        0.5 * (lo + hi)
    }
}

/// Rectangle `[re_min, re_max] x [im_min, im_max]` of the `h omega` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Option<Self> {
        let ok = re_min < re_max
            && im_min < im_max
            && [re_min, re_max, im_min, im_max]
                .iter()
                .all(|v| v.is_finite());
        ok.then_some(Window {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }
}

/// Stability membership at the centers of an `nx` by `ny` grid.
/// Cell `(i, j)` (real index `i`, imaginary index `j`) is stored at
/// `j * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityGrid {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<bool>,
}

impl StabilityGrid {
    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        let w = &self.window;
        let dx = (w.re_max - w.re_min) / self.nx as f64;
        let dy = (w.im_max - w.im_min) / self.ny as f64;
        Complex64::new(
            w.re_min + (i as f64 + 0.5) * dx,
            w.im_min + (j as f64 + 0.5) * dy,
        )
    }

    pub fn is_stable(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.nx + i]
    }

    /// Index of the cell whose center is closest to `z`.
    pub fn nearest_cell(&self, z: Complex64) -> (usize, usize) {
        let w = &self.window;
        let pick = |v: f64, lo: f64, hi: f64, n: usize| {
            let f = (v - lo) / (hi - lo) * n as f64;
            (f.floor().max(0.0) as usize).min(n - 1)
        };
        (
            pick(z.re, w.re_min, w.re_max, self.nx),
            pick(z.im, w.im_min, w.im_max, self.ny),
        )
    }

    pub fn stable_count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Centers and membership in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Complex64, bool)> + '_ {
        (0..self.ny)
            .flat_map(move |j| (0..self.nx).map(move |i| (self.center(i, j), self.is_stable(i, j))))
    }
}

/// Membership of every cell center of `window`. Panics on a grid smaller
/// than 2x2.
pub fn stability_region_scan(
    method: Method,
    window: Window,
    nx: usize,
    ny: usize,
) -> StabilityGrid {
    assert!(nx >= 2 && ny >= 2, "grid needs at least 2x2 cells");
    let mut grid = StabilityGrid {
        window,
        nx,
        ny,
        cells: Vec::with_capacity(nx * ny),
    };
    for j in 0..ny {
        for i in 0..nx {
            let z = grid.center(i, j);
            grid.cells.push(is_absolutely_stable(method, z));
        }
    }
    grid
}

/// Algebraic propagation matrices and eigenvalues.
pub mod closed_form {
    use num_complex::Complex64;

    use super::PropagationMatrix;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    pub fn alf_matrix(h: f64, omega: Complex64) -> PropagationMatrix {
        let z = omega * h;
        PropagationMatrix {
            alpha: c(1.0) + z,
            beta: omega * (h * h / 2.0),
            gamma: omega * 2.0,
            delta: z - 1.0,
        }
    }

    pub fn dalf_matrix(h: f64, omega: Complex64) -> PropagationMatrix {
        let z = omega * h;
        PropagationMatrix {
            alpha: c(1.0) + z + z * z / 2.0,
            beta: omega * omega * (h * h * h / 8.0),
            gamma: omega * omega * (2.0 * h),
            delta: c(1.0) - z + z * z / 2.0,
        }
    }

    /// The ADALF matrix with the published entries. Only `alpha`, `delta`
    /// and the product `beta * gamma` agree with the step algorithm.
    pub fn adalf_matrix_published(h: f64, omega: Complex64) -> PropagationMatrix {
        let z = omega * h;
        PropagationMatrix {
            alpha: c(1.0) + z + z * z / 2.0,
            beta: z * h * (c(1.0) + z) / 16.0,
            gamma: omega * omega * (2.0 * h),
            delta: z * (z - 1.0) / 4.0,
        }
    }

    pub fn rk2_matrix(h: f64, omega: Complex64, a1: f64) -> PropagationMatrix {
        let z = omega * h;
        let alpha = c(1.0) + z * (1.0 - a1);
        let beta = (c(a1) + z / 2.0) * h;
        PropagationMatrix {
            alpha,
            beta,
            gamma: omega * alpha,
            delta: z * (c(a1) + z / 2.0),
        }
    }

    pub fn ev_alf(z: Complex64) -> (Complex64, Complex64) {
        let root = (c(1.0) + z * z).sqrt();
        (z + root, z - root)
    }

    /// Relaxed ALF: trace `2 - 2 lambda + 2 lambda z`, determinant
    /// `1 - 2 lambda` for every `z`.
    pub fn alf_relaxed_trace_det(z: Complex64, lambda: f64) -> (Complex64, f64) {
        (c(2.0 - 2.0 * lambda) + 2.0 * lambda * z, 1.0 - 2.0 * lambda)
    }

    pub fn ev_dalf(z: Complex64) -> (Complex64, Complex64) {
        let z2 = z * z;
        let root = z * (c(4.0) + z2).sqrt();
        ((c(2.0) + z2 + root) / 2.0, (c(2.0) + z2 - root) / 2.0)
    }

    pub fn ev_adalf(z: Complex64) -> (Complex64, Complex64) {
        let p = c(4.0) + z * 3.0 + z * z * 3.0;
        let root = (z * 16.0 + p * p).sqrt();
        ((p + root) / 8.0, (p - root) / 8.0)
    }

    /// Same for every `a1`.
    pub fn ev_rk2(z: Complex64) -> (Complex64, Complex64) {
        (c(0.0), c(1.0) + z + z * z / 2.0)
    }

    /// `|1 + z + z^2/2|^2 - 1`, expanded so that no cancellation occurs on
    /// the imaginary axis: `2x + 2x^2 + r^2 (x + r^2/4)`, `r = |z|`.
    pub fn rk2_margin(z: Complex64) -> f64 {
        let x = z.re;
        let r2 = z.norm_sqr();
        2.0 * x + 2.0 * x * x + r2 * (x + r2 / 4.0)
    }
}
