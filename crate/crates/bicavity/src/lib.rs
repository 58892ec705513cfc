//! Dissipative dynamics of two cavity modes coupled to a common reservoir,
//! and the decoherence/fidelity of a superposition of coherent states (SCS)
//! prepared in one of the modes.
//!
//! The crate has three independent routes to the same physics:
//!
//! - [`model`] + [`propagator`] + [`states`]: the closed-form route. A 2x2
//!   drift matrix `M = [[A, C], [C*, B]]` governs the mean-amplitude flow
//!   `da/dt = -M a`; its exponential gives the mode-mixing coefficients
//!   `u_ij(t)`, from which the decoherence factor `Z(t)` and the SCS fidelity
//!   follow in closed form.
//! - [`micro_bath`]: an exact brute-force oracle. The reservoir is discretized
//!   into `N` oscillator modes and the full `(2+N)`-mode quadratic Hamiltonian
//!   is diagonalized; coherent amplitudes evolve exactly, with no Markov
//!   approximation.
//! - [`lindblad`]: a second, independent oracle. A truncated two-mode Fock
//!   space master equation with cross-decay and flat thermal occupation,
//!   integrated with classic fourth-order stepping.
//!
//! All frequencies and rates are in rad/s and 1/s; times in seconds.

pub mod linalg;
pub mod lindblad;
pub mod micro_bath;
pub mod model;
pub mod propagator;
pub mod states;

pub use model::{chi_shift, Branch, DriftConstants, Frame, PhysicalConfig, Violation};
pub use propagator::{
    bath_leak_row1, mixing_closed_form, mixing_coefficients, thermal_noise, MixingMatrix,
};
pub use states::{
    cat_observables, char_function, decoherence_factor, evolve_branched, evolved_amplitude,
    fidelity_scs, husimi_q, BranchedDensity, BranchedState, CatObservables, GridSpec,
    PhaseSpaceField,
};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("detuning must be nonzero when an atomic branch is selected")]
    ZeroDetuning,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("thermal occupation must be >= 0, got {0}")]
    NegativeNbar(f64),

    #[error(
        "requested span {span:.3e} s exceeds half the bath recurrence horizon \
         ({horizon:.3e} s); at least {required_n} bath modes are needed"
    )]
    Horizon {
        span: f64,
        horizon: f64,
        required_n: usize,
    },

    #[error("thermal occupation {0} > 0 is not supported on the closed-form path")]
    ThermalUnsupported(f64),

    #[error("state has zero norm within numerical precision")]
    DegenerateState,

    #[error("fidelity {0} left [0, 1] beyond the numerical tolerance")]
    FidelityRange(f64),

    #[error("decay matrix is not positive semidefinite: {0}")]
    NotDissipative(String),

    #[error("coherent amplitude |{0}| does not fit the Fock truncation (tail mass {1:.3e})")]
    Truncation(f64, f64),

    #[error("step control failed: {0}")]
    StepControl(String),
}

pub type Result<T> = std::result::Result<T, Error>;
