//! Evolution of finite superpositions of two-mode coherent products, the
//! decoherence factor `Z(t)`, the SCS fidelity, and phase-space diagnostics.
//!
//! At zero temperature every branch `|a_i>|b_i>|{0}>` of the initial state
//! stays a multimode coherent product under the linear system+bath evolution.
//! Tracing out mode 2 and the reservoir leaves
//!
//! ```text
//! rho_1(t) = (1/normsq) sum_ij c_i c_j* z_ij |v_i> <v_j| ,
//! v_i = u11 a_i + u12 b_i ,
//! ```
//!
//! where `z_ij` is the overlap of the branch environments (mode 2 plus all
//! reservoir modes). Unitarity of the full evolution eliminates every bath
//! amplitude from that overlap, so `z_ij` reduces to initial-state data and
//! the mode-1 row of the mixing matrix:
//!
//! ```text
//! ln z_ij = (a_j* a_i + b_j* b_i) - v_j* v_i
//!           - (|a_i|^2 + |b_i|^2 - |v_i|^2)/2
//!           - (|a_j|^2 + |b_j|^2 - |v_j|^2)/2 .
//! ```
//!
//! For the SCS `(|a0> + |-a0>)|a0>` the off-diagonal factor becomes
//! `Z(t) = exp{-2|a0|^2 [(1 - |u11|^2) + i Im(u12* u11)]}`.

use num_complex::Complex64 as C64;

use crate::propagator::{thermal_noise, MixingMatrix};
use crate::{Error, Result};

/// `<bra|ket>` for coherent states.
pub fn coherent_overlap(bra: C64, ket: C64) -> C64 {
    (bra.conj() * ket - 0.5 * (bra.norm_sqr() + ket.norm_sqr())).exp()
}

/// One branch of a superposition of two-mode coherent products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchAmplitude {
    /// Superposition weight (unnormalized).
    pub weight: C64,
    /// Mode-1 coherent amplitude.
    pub mode1: C64,
    /// Mode-2 coherent amplitude.
    pub mode2: C64,
}

/// A finite superposition `sum_i c_i |a_i>_1 |b_i>_2` with the reservoir in
/// vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedState {
    pub branches: Vec<BranchAmplitude>,
}

impl BranchedState {
    pub fn new(branches: Vec<BranchAmplitude>) -> Self {
        assert!(!branches.is_empty(), "at least one branch required");
        BranchedState { branches }
    }

    /// The SCS `(|a0> + |-a0>)_1 |a0>_2` with unit weights.
    pub fn cat(alpha0: C64) -> Self {
        BranchedState::new(vec![
            BranchAmplitude {
                weight: C64::new(1.0, 0.0),
                mode1: alpha0,
                mode2: alpha0,
            },
            BranchAmplitude {
                weight: C64::new(1.0, 0.0),
                mode1: -alpha0,
                mode2: alpha0,
            },
        ])
    }

    /// Squared norm via the two-mode coherent Gram matrix.
    pub fn norm_sq(&self) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for bi in &self.branches {
            for bj in &self.branches {
                acc += bi.weight
                    * bj.weight.conj()
                    * coherent_overlap(bj.mode1, bi.mode1)
                    * coherent_overlap(bj.mode2, bi.mode2);
            }
        }
        acc.re
    }
}

/// Evolved reduced state of mode 1 for a branched initial state: amplitudes
/// `v_i(t)`, pairwise environment-overlap factors `z_ij(t)` and the conserved
/// normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedDensity {
    /// Time (s).
    pub t: f64,
    /// Branch weights, copied from the initial state.
    pub weights: Vec<C64>,
    /// Evolved mode-1 amplitudes `v_i = u11 a_i + u12 b_i`.
    pub amps: Vec<C64>,
    /// Row-major `n x n` coherence factors `z_ij`, `z_ii = 1`, `|z_ij| <= 1`.
    pub coh: Vec<C64>,
    /// Initial squared norm (preserved by the evolution).
    pub norm_sq: f64,
}

impl BranchedDensity {
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn z(&self, i: usize, j: usize) -> C64 {
        self.coh[i * self.len() + j]
    }

    /// The weighted coherence matrix `c_i c_j* z_ij <v_j|v_i> / normsq` whose
    /// positive semidefiniteness makes `rho_1` a valid density operator.
    /// Its entries sum to `Tr rho_1 = 1`.
    pub fn gram(&self) -> Vec<C64> {
        let n = self.len();
        let mut g = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = self.weights[i] * self.weights[j].conj() * self.z(i, j)
                    * coherent_overlap(self.amps[j], self.amps[i])
                    / self.norm_sq;
            }
        }
        g
    }
}

/// Evolved mode-1 amplitude of a state prepared as `|a0>_1 |a0>_2`:
/// `alpha(t) = alpha0 (u11 + u12)`.
pub fn evolved_amplitude(mix: &MixingMatrix, alpha0: C64) -> C64 {
    alpha0 * (mix.u11 + mix.u12)
}

/// Decoherence factor of the SCS:
/// `Z(t) = exp{-2|a0|^2 [(1 - |u11|^2) + i Im(u12* u11)]}`.
///
/// Valid for complex `alpha0`; reduces to the single-mode law
/// `exp(-2|a0|^2 (1 - e^{-gamma11 t}))` when the cross mixing vanishes.
pub fn decoherence_factor(mix: &MixingMatrix, alpha0: C64) -> C64 {
    let re = 1.0 - mix.u11.norm_sqr();
    let im = (mix.u12.conj() * mix.u11).im;
    (-2.0 * alpha0.norm_sqr() * C64::new(re, im)).exp()
}

/// Evolve a branched state through the mixing matrix (zero-temperature path).
///
/// `nbar > 0` is rejected; thermal evolution is the master-equation
/// integrator's job.
pub fn evolve_branched(
    mix: &MixingMatrix,
    state: &BranchedState,
    nbar: f64,
) -> Result<BranchedDensity> {
    if nbar > 0.0 {
        return Err(Error::ThermalUnsupported(nbar));
    }
    let norm_sq = state.norm_sq();
    if !norm_sq.is_finite() || norm_sq <= 1e-14 {
        return Err(Error::DegenerateState);
    }
    let n = state.branches.len();
    let amps: Vec<C64> = state
        .branches
        .iter()
        .map(|b| mix.u11 * b.mode1 + mix.u12 * b.mode2)
        .collect();
    let mut coh = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let bi = &state.branches[i];
            let bj = &state.branches[j];
            let init = bj.mode1.conj() * bi.mode1 + bj.mode2.conj() * bi.mode2;
            let exponent = init - amps[j].conj() * amps[i]
                - 0.5 * (bi.mode1.norm_sqr() + bi.mode2.norm_sqr() - amps[i].norm_sqr())
                - 0.5 * (bj.mode1.norm_sqr() + bj.mode2.norm_sqr() - amps[j].norm_sqr());
            coh[i * n + j] = exponent.exp();
        }
    }
    Ok(BranchedDensity {
        t: mix.t,
        weights: state.branches.iter().map(|b| b.weight).collect(),
        amps,
        coh,
        norm_sq,
    })
}

/// Observables of the evolved SCS at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatObservables {
    /// Surviving lobe amplitude `alpha(t) = alpha0 (u11 + u12)`.
    pub alpha_t: C64,
    /// Decoherence factor.
    pub z: C64,
    /// Normalization of the prepared SCS, `[1 + e^{-2|a0|^2}]^{-1/2}`.
    pub np: f64,
    /// Normalization of the evolved state,
    /// `[2 + (Z e^{-2|alpha(t)|^2} + c.c.)]^{-1/2}`.
    pub ne: f64,
    /// Fidelity of the evolved state against the prepared SCS.
    pub fidelity: f64,
    /// Thermal noise weight `D(t) = nbar L1(t)`.
    pub thermal_noise: f64,
}

/// Fidelity of the evolved SCS against the static prepared SCS,
/// `F = <Psi| rho_1(t) |Psi>`, evaluated in closed form.
///
/// The evolved state has lobes at `alpha0 (u12 + u11)` and
/// `alpha0 (u12 - u11)` with coherence `Z(t)`; both overlaps with the
/// prepared lobes `+/- alpha0` are kept exactly.
pub fn fidelity_scs(mix: &MixingMatrix, alpha0: C64) -> Result<f64> {
    let plus = alpha0 * (mix.u11 + mix.u12);
    let minus = alpha0 * (mix.u12 - mix.u11);
    let z = decoherence_factor(mix, alpha0);
    // norm^2 of the unnormalized cat, identical for prepared and evolved.
    let catnorm_sq = 2.0 + 2.0 * (-2.0 * alpha0.norm_sqr()).exp();
    // <a0|v> + <-a0|v> = 2 e^{-(|a0|^2+|v|^2)/2} cosh(a0* v)
    let bra_cat = |v: C64| -> C64 {
        2.0 * (-0.5 * (alpha0.norm_sqr() + v.norm_sqr())).exp() * (alpha0.conj() * v).cosh()
    };
    let t_plus = bra_cat(plus);
    let t_minus = bra_cat(minus);
    let raw = t_plus.norm_sqr() + t_minus.norm_sqr()
        + 2.0 * (z * t_plus * t_minus.conj()).re;
    let f = raw / (catnorm_sq * catnorm_sq);
    check_fidelity_range(f)
}

/// The compact mirror-lobe arrangement of the SCS fidelity, exact whenever
/// the evolved lobes remain mirror images (`u12 = 0`, in particular for zero
/// cross decay):
///
/// ```text
/// F = Np^2 Ne^2 e^{-(|alpha(t)|^2 + |a0|^2)}
///     { cosh[a0* alpha(t) + a0 alpha*(t)] + cosh[a0* alpha(t) - a0 alpha*(t)] }
///     [2 + Z + Z*]
/// ```
pub fn fidelity_scs_mirror(mix: &MixingMatrix, alpha0: C64) -> f64 {
    let alpha_t = evolved_amplitude(mix, alpha0);
    let z = decoherence_factor(mix, alpha0);
    let np_sq = 1.0 / (1.0 + (-2.0 * alpha0.norm_sqr()).exp());
    let ne_sq = 1.0 / (2.0 + 2.0 * (z * (-2.0 * alpha_t.norm_sqr()).exp()).re);
    let w = alpha0.conj() * alpha_t;
    let wbar = alpha0 * alpha_t.conj();
    let cosh_sum = ((w + wbar).cosh() + (w - wbar).cosh()).re;
    np_sq
        * ne_sq
        * (-(alpha_t.norm_sqr() + alpha0.norm_sqr())).exp()
        * cosh_sum
        * (2.0 + 2.0 * z.re)
}

fn check_fidelity_range(f: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&f) {
        return Err(Error::FidelityRange(f));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// All SCS observables at one time.
pub fn cat_observables(mix: &MixingMatrix, alpha0: C64, nbar: f64) -> Result<CatObservables> {
    let alpha_t = evolved_amplitude(mix, alpha0);
    let z = decoherence_factor(mix, alpha0);
    let np = (1.0 + (-2.0 * alpha0.norm_sqr()).exp()).powf(-0.5);
    let ne = (2.0 + 2.0 * (z * (-2.0 * alpha_t.norm_sqr()).exp()).re).powf(-0.5);
    Ok(CatObservables {
        alpha_t,
        z,
        np,
        ne,
        fidelity: fidelity_scs(mix, alpha0)?,
        thermal_noise: thermal_noise(mix, nbar)?,
    })
}

/// Normally ordered characteristic function of the evolved mode-1 state,
/// including the thermal factor `exp(-|eta|^2 D)`:
///
/// ```text
/// G(eta) = e^{-D |eta|^2} / normsq *
///          sum_ij c_i c_j* z_ij <v_j|v_i> exp(eta v_j* - eta* v_i)
/// ```
pub fn char_function(bd: &BranchedDensity, eta: C64, d_noise: f64) -> C64 {
    assert!(d_noise >= 0.0, "thermal noise weight must be >= 0");
    let n = bd.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += bd.weights[i]
                * bd.weights[j].conj()
                * bd.z(i, j)
                * coherent_overlap(bd.amps[j], bd.amps[i])
                * (eta * bd.amps[j].conj() - eta.conj() * bd.amps[i]).exp();
        }
    }
    acc / bd.norm_sq * (-d_noise * eta.norm_sqr()).exp()
}

/// A square sampling grid in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub center: C64,
    /// Half-width of the square window along both axes.
    pub half_extent: f64,
    /// Number of samples per axis (>= 2).
    pub n: usize,
}

impl GridSpec {
    pub fn new(center: C64, half_extent: f64, n: usize) -> Self {
        assert!(n >= 2 && half_extent > 0.0 && half_extent.is_finite());
        GridSpec {
            center,
            half_extent,
            n,
        }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_extent / (self.n - 1) as f64
    }

    /// Grid point at integer coordinates, row-major with the imaginary axis
    /// as the outer loop.
    pub fn point(&self, ix: usize, iy: usize) -> C64 {
        let h = self.step();
        self.center + C64::new(-self.half_extent + ix as f64 * h, -self.half_extent + iy as f64 * h)
    }
}

/// Real-valued field sampled on a [`GridSpec`], row-major (imaginary axis
/// outer).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl PhaseSpaceField {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.n + ix]
    }

    /// Riemann-sum integral over the grid window.
    pub fn integral(&self) -> f64 {
        let h = self.grid.step();
        self.values.iter().sum::<f64>() * h * h
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Husimi field `Q(xi) = <xi| rho_1 |xi> / pi` of the evolved mode-1 state,
/// with the thermal weight `D` folded in as a Gaussian broadening:
///
/// ```text
/// Q(xi) = 1 / (pi (1+D) normsq) *
///         sum_ij c_i c_j* z_ij <v_j|v_i> exp[-(v_j* - xi*)(v_i - xi)/(1+D)]
/// ```
///
/// Values are clamped at zero against rounding; the grid integral approaches
/// 1 for a window that covers the state.
pub fn husimi_q(bd: &BranchedDensity, grid: &GridSpec, d_noise: f64) -> Result<PhaseSpaceField> {
    if d_noise.is_nan() || d_noise < 0.0 {
        return Err(Error::NegativeNbar(d_noise));
    }
    let n = bd.len();
    let s = 1.0 + d_noise;
    let mut pair_weight = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            pair_weight[i * n + j] = bd.weights[i] * bd.weights[j].conj() * bd.z(i, j)
                * coherent_overlap(bd.amps[j], bd.amps[i]);
        }
    }
    let prefactor = 1.0 / (std::f64::consts::PI * s * bd.norm_sq);
    let mut values = Vec::with_capacity(grid.n * grid.n);
    for iy in 0..grid.n {
        for ix in 0..grid.n {
            let xi = grid.point(ix, iy);
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let e = -(bd.amps[j].conj() - xi.conj()) * (bd.amps[i] - xi) / s;
                    acc += pair_weight[i * n + j] * e.exp();
                }
            }
            values.push((prefactor * acc.re).max(0.0));
        }
    }
    Ok(PhaseSpaceField { grid: *grid, values })
}
