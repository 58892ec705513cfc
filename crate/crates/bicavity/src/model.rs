//! Physical parameters and the drift constants of the two-mode dissipative
//! system.
//!
//! Mode 1 carries the prepared superposition and interacts dispersively with
//! a two-level atom, which shifts its frequency by `-chi` (`+chi`) when the
//! atom is in the ground (excited) state, `chi = g^2 / delta1`. Both modes
//! decay into the same reservoir with rates `gamma11`, `gamma22` and a
//! cross-decay rate `gamma12 = kappa * sqrt(gamma11 * gamma22)`.
//!
//! The mean coherent amplitudes obey `d/dt (a1, a2) = -M (a1, a2)` with
//!
//! ```text
//! M = | A  C  |      A = i(w1_eff +/- chi + dw1) + gamma11/2
//!     | C* B  |      B = i(w2_eff + dw2)         + gamma22/2
//!                    C = i dw12                  + gamma12/2
//! ```
//!
//! In the `Rotating` frame the deterministic mode frequencies `w1_eff`,
//! `w2_eff` are zero (the frame co-rotates with the bare modes), so fidelity
//! decay measures only dissipation and mixing; the dispersive shift and the
//! Lamb shifts are kept. In the `Lab` frame the raw frequencies remain.

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Atomic state selecting the sign of the dispersive shift on mode 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// No atom: the dispersive shift is absent.
    #[default]
    None,
    /// Ground state: mode-1 frequency shifted by `-chi`.
    Ground,
    /// Excited state: mode-1 frequency shifted by `+chi`.
    Excited,
}

impl Branch {
    /// Sign of the dispersive shift: -1 (ground), +1 (excited), 0 (none).
    pub fn sign(self) -> f64 {
        match self {
            Branch::None => 0.0,
            Branch::Ground => -1.0,
            Branch::Excited => 1.0,
        }
    }
}

/// Phase convention for the deterministic part of the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// Co-rotate with the bare mode frequencies (`w1_eff = w2_eff = 0`).
    #[default]
    Rotating,
    /// Keep the raw mode frequencies on the drift diagonal.
    Lab,
}

/// All physical rates and frequencies of the two-mode system.
///
/// Frequencies and shifts in rad/s, decay rates in 1/s.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    /// Bare frequency of mode 1 (rad/s).
    pub omega1: f64,
    /// Bare frequency of mode 2 (rad/s).
    pub omega2: f64,
    /// Rabi frequency of the atom-field coupling (rad/s).
    pub g: f64,
    /// Detuning `omega1 - omega0` between mode 1 and the atom (rad/s).
    pub delta1: f64,
    /// Atomic branch selecting the sign of the dispersive shift.
    pub branch: Branch,
    /// Decay rate of mode 1 (1/s).
    pub gamma11: f64,
    /// Decay rate of mode 2 (1/s).
    pub gamma22: f64,
    /// Cross-decay overlap ratio in [-1, 1]; `gamma12 = kappa * sqrt(gamma11 gamma22)`.
    pub kappa: f64,
    /// Lamb shift of mode 1 (rad/s).
    pub dshift1: f64,
    /// Lamb shift of mode 2 (rad/s).
    pub dshift2: f64,
    /// Cross Lamb shift (rad/s).
    pub dshift12: f64,
    /// Flat thermal mean occupation of the reservoir.
    pub nbar: f64,
    /// Phase convention for the drift diagonal.
    pub frame: Frame,
}

impl Default for PhysicalConfig {
    /// Damping times 1 ms and 0.9 ms, no cross decay, no atom, zero
    /// temperature, rotating frame.
    fn default() -> Self {
        PhysicalConfig {
            omega1: 0.0,
            omega2: 0.0,
            g: 0.0,
            delta1: 0.0,
            branch: Branch::None,
            gamma11: 1.0e3,
            gamma22: 1.0 / 0.9e-3,
            kappa: 0.0,
            dshift1: 0.0,
            dshift2: 0.0,
            dshift12: 0.0,
            nbar: 0.0,
            frame: Frame::Rotating,
        }
    }
}

/// A named violation of a [`PhysicalConfig`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Dispersive shift `chi = g^2 / delta1` (signed).
pub fn chi_shift(g: f64, delta1: f64) -> Result<f64> {
    if delta1 == 0.0 || !delta1.is_finite() {
        return Err(Error::ZeroDetuning);
    }
    Ok(g * g / delta1)
}

impl PhysicalConfig {
    /// Cross-decay rate `gamma12 = kappa * sqrt(gamma11 * gamma22)` (1/s).
    pub fn gamma12(&self) -> f64 {
        self.kappa * (self.gamma11 * self.gamma22).sqrt()
    }

    /// Dispersive shift seen by mode 1, zero when no branch is selected.
    pub fn chi(&self) -> Result<f64> {
        match self.branch {
            Branch::None => Ok(0.0),
            _ => chi_shift(self.g, self.delta1),
        }
    }

    /// Check every invariant; an empty list means the configuration is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let finite = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("g", self.g),
            ("delta1", self.delta1),
            ("gamma11", self.gamma11),
            ("gamma22", self.gamma22),
            ("kappa", self.kappa),
            ("dshift1", self.dshift1),
            ("dshift2", self.dshift2),
            ("dshift12", self.dshift12),
            ("nbar", self.nbar),
        ];
        for (name, x) in finite {
            if !x.is_finite() {
                v.push(Violation {
                    field: name,
                    message: format!("must be finite, got {x}"),
                });
            }
        }
        if self.gamma11 < 0.0 {
            v.push(Violation {
                field: "gamma11",
                message: format!("negative decay rate {}", self.gamma11),
            });
        }
        if self.gamma22 < 0.0 {
            v.push(Violation {
                field: "gamma22",
                message: format!("negative decay rate {}", self.gamma22),
            });
        }
        if self.kappa.abs() > 1.0 {
            v.push(Violation {
                field: "kappa",
                message: format!(
                    "cross-decay bound violated: |{}| > 1 (requires |gamma12| <= sqrt(gamma11 gamma22))",
                    self.kappa
                ),
            });
        }
        if self.branch != Branch::None && self.delta1 == 0.0 {
            v.push(Violation {
                field: "delta1",
                message: "must be nonzero when an atomic branch is selected".into(),
            });
        }
        if self.nbar < 0.0 {
            v.push(Violation {
                field: "nbar",
                message: format!("negative thermal occupation {}", self.nbar),
            });
        }
        v
    }

    /// Return `Err` carrying all violations if the configuration is invalid.
    pub fn checked(&self) -> Result<&Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            Err(Error::Config(list.join("; ")))
        }
    }

    /// Drift constants `A`, `B`, `C` of the mean-amplitude flow.
    pub fn drift_constants(&self) -> Result<DriftConstants> {
        self.checked()?;
        let chi = self.chi()?;
        let (w1, w2) = match self.frame {
            Frame::Rotating => (0.0, 0.0),
            Frame::Lab => (self.omega1, self.omega2),
        };
        let a = C64::new(0.5 * self.gamma11, w1 + self.branch.sign() * chi + self.dshift1);
        let b = C64::new(0.5 * self.gamma22, w2 + self.dshift2);
        let c = C64::new(0.5 * self.gamma12(), self.dshift12);
        Ok(DriftConstants { a, b, c })
    }
}

/// Complex drift constants of the 2x2 mean-amplitude flow `da/dt = -M a`,
/// `M = [[A, C], [C*, B]]`.
///
/// `Re A = gamma11/2`, `Re B = gamma22/2` and `Re C = gamma12/2` by
/// construction; the real part of `M` is positive semidefinite whenever
/// `|kappa| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftConstants {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl DriftConstants {
    /// The drift matrix `M = [[A, C], [C*, B]]` in row-major order.
    pub fn matrix(&self) -> [C64; 4] {
        [self.a, self.c, self.c.conj(), self.b]
    }

    /// Eigenvalues of `M`: `(A+B)/2 -/+ nu` with
    /// `nu = sqrt(((B-A)/2)^2 + |C|^2)`.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let half_sum = 0.5 * (self.a + self.b);
        let nu = self.splitting();
        (half_sum - nu, half_sum + nu)
    }

    /// The half-splitting `nu = sqrt(((B-A)/2)^2 + |C|^2)`.
    pub fn splitting(&self) -> C64 {
        let half_diff = 0.5 * (self.b - self.a);
        (half_diff * half_diff + self.c.norm_sqr()).sqrt()
    }
}
