//! Mode-mixing coefficients `u_ij(t)` of the damped two-mode system.
//!
//! The mean coherent amplitudes contract under `U(t) = exp(-M t)` with
//! `M = [[A, C], [C*, B]]` from [`DriftConstants`]. Writing
//! `nu = sqrt(((B-A)/2)^2 + |C|^2)` the exponential is
//!
//! ```text
//! u11 = e^{-(A+B)t/2} [ cosh(nu t) + (B-A)/(2 nu) sinh(nu t) ]
//! u12 = -e^{-(A+B)t/2}  C/nu  sinh(nu t)
//! ```
//!
//! with `u22`, `u21` obtained by swapping `A <-> B` and `C -> C*`. Near the
//! eigenvalue degeneracy `nu t -> 0` the ratio `sinh(nu t)/nu` is evaluated
//! by series expansion.
//!
//! [`mixing_coefficients`] is the canonical path; [`mixing_closed_form`]
//! evaluates the same hyperbolic expressions arranged around the full radical
//! `sqrt((B-A)^2 + 4|C|^2)` and is kept as a transcription regression. Both
//! agree to machine precision.

use num_complex::Complex64 as C64;

use crate::model::DriftConstants;
use crate::{Error, Result};

/// The 2x2 complex contraction mapping initial coherent amplitudes of the two
/// modes to their values at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingMatrix {
    /// Time (s).
    pub t: f64,
    pub u11: C64,
    pub u12: C64,
    pub u21: C64,
    pub u22: C64,
}

impl MixingMatrix {
    pub fn identity() -> Self {
        MixingMatrix {
            t: 0.0,
            u11: C64::new(1.0, 0.0),
            u12: C64::new(0.0, 0.0),
            u21: C64::new(0.0, 0.0),
            u22: C64::new(1.0, 0.0),
        }
    }

    /// `|u11|^2 + |u12|^2`, at most 1 for dissipative evolution.
    pub fn row1_norm_sq(&self) -> f64 {
        self.u11.norm_sqr() + self.u12.norm_sqr()
    }

    /// `|u21|^2 + |u22|^2`.
    pub fn row2_norm_sq(&self) -> f64 {
        self.u21.norm_sqr() + self.u22.norm_sqr()
    }

    /// How far the row norms exceed 1 (0 when contractive).
    pub fn contraction_excess(&self) -> f64 {
        (self.row1_norm_sq() - 1.0)
            .max(self.row2_norm_sq() - 1.0)
            .max(0.0)
    }

    /// Matrix product `self * rhs` (used by the semigroup property).
    pub fn compose(&self, rhs: &MixingMatrix) -> MixingMatrix {
        MixingMatrix {
            t: self.t + rhs.t,
            u11: self.u11 * rhs.u11 + self.u12 * rhs.u21,
            u12: self.u11 * rhs.u12 + self.u12 * rhs.u22,
            u21: self.u21 * rhs.u11 + self.u22 * rhs.u21,
            u22: self.u21 * rhs.u12 + self.u22 * rhs.u22,
        }
    }

    /// Max elementwise distance to another mixing matrix.
    pub fn max_abs_diff(&self, rhs: &MixingMatrix) -> f64 {
        [
            self.u11 - rhs.u11,
            self.u12 - rhs.u12,
            self.u21 - rhs.u21,
            self.u22 - rhs.u22,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }
}

/// `sinh(z)/z`, series near zero.
fn sinhc(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        C64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Mode-mixing coefficients `U(t) = exp(-M t)` via the closed-form 2x2
/// eigendecomposition, with a series branch at eigenvalue degeneracy.
///
/// Panics on non-finite inputs or `t < 0`.
pub fn mixing_coefficients(dc: &DriftConstants, t: f64) -> MixingMatrix {
    assert!(t.is_finite() && t >= 0.0, "time must be finite and >= 0");
    for z in [dc.a, dc.b, dc.c] {
        assert!(z.re.is_finite() && z.im.is_finite(), "drift constants must be finite");
    }
    let half_sum = 0.5 * (dc.a + dc.b);
    let half_diff = 0.5 * (dc.b - dc.a);
    let nu = dc.splitting();
    let x = nu * t;
    let phase = (-half_sum * t).exp();
    let ch = x.cosh();
    let shc_t = sinhc(x) * t; // sinh(nu t)/nu
    MixingMatrix {
        t,
        u11: phase * (ch + half_diff * shc_t),
        u12: -phase * dc.c * shc_t,
        u21: -phase * dc.c.conj() * shc_t,
        u22: phase * (ch - half_diff * shc_t),
    }
}

/// Row `(u_j1-like, u_j2-like)` of the printed hyperbolic form, with the
/// hyperbolic argument `sqrt((B-A)^2 + 4|C|^2) * t / 2`.
fn closed_form_row(a: C64, b: C64, c: C64, t: f64) -> (C64, C64) {
    let radical = ((b - a) * (b - a) + 4.0 * c.norm_sqr()).sqrt();
    let arg = 0.5 * radical * t;
    let phase = (-0.5 * (a + b) * t).exp();
    let ch = arg.cosh();
    if (radical * t).norm() < 1e-6 {
        // Degenerate radical: sinh(arg)/radical -> (t/2) sinhc(arg).
        let s_over_r = 0.5 * t * sinhc(arg);
        (
            phase * ((b - a) * s_over_r + ch),
            -phase * 2.0 * c * s_over_r,
        )
    } else {
        let sh = arg.sinh();
        (
            phase * ((b - a) / radical * sh + ch),
            -phase * (2.0 * c / radical) * sh,
        )
    }
}

/// The printed hyperbolic expressions for `u_ij(t)`; the second row follows
/// from the first by the swap `A <-> B`, `C -> C*`.
///
/// Kept as a regression check against [`mixing_coefficients`].
pub fn mixing_closed_form(dc: &DriftConstants, t: f64) -> MixingMatrix {
    assert!(t.is_finite() && t >= 0.0, "time must be finite and >= 0");
    let (u11, u12) = closed_form_row(dc.a, dc.b, dc.c, t);
    let (u22, u21) = closed_form_row(dc.b, dc.a, dc.c.conj(), t);
    MixingMatrix {
        t,
        u11,
        u12,
        u21,
        u22,
    }
}

/// Fraction of the initial mode-1 amplitude lost to the reservoir,
/// `L1(t) = 1 - |u11|^2 - |u12|^2`, clamped to `[0, 1]`.
///
/// By unitarity of the full system+bath evolution this equals the summed
/// squared bath amplitudes fed by mode 1.
pub fn bath_leak_row1(mix: &MixingMatrix) -> f64 {
    (1.0 - mix.row1_norm_sq()).clamp(0.0, 1.0)
}

/// Thermal noise weight `D(t) = nbar * L1(t)` entering the characteristic
/// function for a flat reservoir occupation `nbar`.
pub fn thermal_noise(mix: &MixingMatrix, nbar: f64) -> Result<f64> {
    if nbar.is_nan() || nbar < 0.0 {
        return Err(Error::NegativeNbar(nbar));
    }
    Ok(nbar * bath_leak_row1(mix))
}
