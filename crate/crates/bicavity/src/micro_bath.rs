//! Exact brute-force oracle: the two cavity modes plus `N` discretized
//! reservoir oscillators form one quadratic Hamiltonian whose real symmetric
//! coupling matrix `Omega` is diagonalized once. Coherent amplitudes then
//! evolve exactly as `v(t) = exp(-i Omega t) v(0)` with no Markov or
//! flat-spectrum approximation, giving exact mixing coefficients, bath
//! amplitudes, decoherence factors and fidelities.
//!
//! The reservoir band has `N` modes uniformly spanning `W` around the system
//! frequencies, with flat couplings chosen so that the smoothed spectral
//! densities reproduce `gamma11`, `gamma22` and
//! `gamma12 = kappa sqrt(gamma11 gamma22)` exactly: the mode-2 coupling
//! vector is split into components parallel and orthogonal (alternating sign)
//! to the mode-1 couplings, realizing any overlap `kappa` in [-1, 1].
//!
//! A discretized bath is periodic: amplitude fed into the reservoir returns
//! after the recurrence time `T_rec = 2 pi rho_dos`. All evaluations refuse
//! times beyond `T_rec / 2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use crate::model::PhysicalConfig;
use crate::propagator::MixingMatrix;
use crate::{Error, Result};

/// Discretized reservoir plus the cached eigendecomposition of the full
/// `(2+N) x (2+N)` coupling matrix. Immutable once built.
#[derive(Debug, Clone)]
pub struct BathModel {
    /// Number of reservoir modes.
    pub n_modes: usize,
    /// Band width `W` (rad/s).
    pub band_width: f64,
    /// Reservoir mode frequencies (rad/s).
    pub omegas: Vec<f64>,
    /// Couplings of mode 1 to each reservoir mode (rad/s).
    pub lambda1: Vec<f64>,
    /// Couplings of mode 2 to each reservoir mode (rad/s).
    pub lambda2: Vec<f64>,
    /// Density of states `N / W` (s/rad).
    pub rho_dos: f64,
    /// Requested coupling-vector overlap.
    pub kappa_target: f64,
    /// System diagonal entries of `Omega` (frame- and branch-adjusted).
    pub sys_diag: [f64; 2],
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

/// Coherent amplitudes of the full system: `(a1, a2, b_1 .. b_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroAmplitudeVector(pub Vec<C64>);

impl MicroAmplitudeVector {
    /// The two system amplitudes followed by zeros for the vacuum reservoir.
    pub fn system(a1: C64, a2: C64, n_modes: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); 2 + n_modes];
        v[0] = a1;
        v[1] = a2;
        MicroAmplitudeVector(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Build a discretized bath able to cover evolutions up to `horizon` seconds.
///
/// `n_modes` is rounded up to even so the orthogonal (alternating-sign)
/// component of the mode-2 couplings cancels exactly.
pub fn build_bath(
    cfg: &PhysicalConfig,
    n_modes: usize,
    band_width: f64,
    horizon: f64,
) -> Result<BathModel> {
    cfg.checked()?;
    if n_modes < 2 || band_width <= 0.0 {
        return Err(Error::Config(format!(
            "bath needs n_modes >= 2 and band_width > 0, got {n_modes}, {band_width}"
        )));
    }
    let n = n_modes + n_modes % 2;
    let rho_dos = n as f64 / band_width;
    let t_rec = TAU * rho_dos;
    if horizon > 0.5 * t_rec {
        let required_n = (2.0 * horizon * band_width / TAU).ceil() as usize;
        return Err(Error::Horizon {
            span: horizon,
            horizon: 0.5 * t_rec,
            required_n: required_n + required_n % 2,
        });
    }

    let chi = cfg.chi()?;
    let (w1, w2) = match cfg.frame {
        crate::model::Frame::Rotating => (0.0, 0.0),
        crate::model::Frame::Lab => (cfg.omega1, cfg.omega2),
    };
    let sys_diag = [w1 + cfg.branch.sign() * chi, w2];
    let center = 0.5 * (sys_diag[0] + sys_diag[1]);

    let step = band_width / n as f64;
    let omegas: Vec<f64> = (0..n)
        .map(|k| center - 0.5 * band_width + (k as f64 + 0.5) * step)
        .collect();
    let bar1 = (cfg.gamma11 * step / TAU).sqrt();
    let bar2 = (cfg.gamma22 * step / TAU).sqrt();
    let ortho = (1.0 - cfg.kappa * cfg.kappa).max(0.0).sqrt();
    let lambda1 = vec![bar1; n];
    let lambda2: Vec<f64> = (0..n)
        .map(|k| bar2 * (cfg.kappa + if k % 2 == 0 { ortho } else { -ortho }))
        .collect();

    let dim = 2 + n;
    let mut omega_mat = DMatrix::<f64>::zeros(dim, dim);
    omega_mat[(0, 0)] = sys_diag[0];
    omega_mat[(1, 1)] = sys_diag[1];
    for k in 0..n {
        omega_mat[(2 + k, 2 + k)] = omegas[k];
        omega_mat[(0, 2 + k)] = lambda1[k];
        omega_mat[(2 + k, 0)] = lambda1[k];
        omega_mat[(1, 2 + k)] = lambda2[k];
        omega_mat[(2 + k, 1)] = lambda2[k];
    }
    let eig = omega_mat.symmetric_eigen();

    Ok(BathModel {
        n_modes: n,
        band_width,
        omegas,
        lambda1,
        lambda2,
        rho_dos,
        kappa_target: cfg.kappa,
        sys_diag,
        eigenvalues: eig.eigenvalues,
        eigenvectors: eig.eigenvectors,
    })
}

impl BathModel {
    /// Recurrence time `2 pi rho_dos` of the discretized reservoir.
    pub fn recurrence_horizon(&self) -> f64 {
        TAU * self.rho_dos
    }

    fn check_horizon(&self, t: f64) -> Result<()> {
        let half = 0.5 * self.recurrence_horizon();
        if t > half {
            let required_n = (2.0 * t * self.band_width / TAU).ceil() as usize;
            return Err(Error::Horizon {
                span: t,
                horizon: half,
                required_n: required_n + required_n % 2,
            });
        }
        Ok(())
    }

    /// `v(t) = exp(-i Omega t) v(0)` through the cached eigendecomposition.
    pub fn propagate(&self, v0: &MicroAmplitudeVector, t: f64) -> MicroAmplitudeVector {
        let dim = 2 + self.n_modes;
        assert_eq!(v0.0.len(), dim, "amplitude vector has wrong dimension");
        // w = Q^T v0, then v(t) = Q (e^{-i lambda t} w).
        let mut w = vec![C64::new(0.0, 0.0); dim];
        for (p, slot) in w.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..dim {
                acc += self.eigenvectors[(m, p)] * v0.0[m];
            }
            *slot = acc * (-C64::i() * self.eigenvalues[p] * t).exp();
        }
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (p, wp) in w.iter().enumerate() {
                acc += self.eigenvectors[(m, p)] * wp;
            }
            *slot = acc;
        }
        MicroAmplitudeVector(out)
    }

    /// One row of `exp(-i Omega t)`.
    fn propagator_row(&self, row: usize, t: f64) -> Vec<C64> {
        let dim = 2 + self.n_modes;
        let mut weighted = vec![C64::new(0.0, 0.0); dim];
        for (p, slot) in weighted.iter_mut().enumerate() {
            *slot = self.eigenvectors[(row, p)] * (-C64::i() * self.eigenvalues[p] * t).exp();
        }
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (p, wp) in weighted.iter().enumerate() {
                acc += self.eigenvectors[(m, p)] * wp;
            }
            *slot = acc;
        }
        out
    }

    /// Exact (non-Markovian) mixing coefficients: the system block of
    /// `exp(-i Omega t)`.
    pub fn extract_mixing(&self, t: f64) -> Result<MixingMatrix> {
        self.check_horizon(t)?;
        let row1 = self.propagator_row(0, t);
        let row2 = self.propagator_row(1, t);
        Ok(MixingMatrix {
            t,
            u11: row1[0],
            u12: row1[1],
            u21: row2[0],
            u22: row2[1],
        })
    }

    /// Summed squared bath entries of the mode-1 row of `exp(-i Omega t)`;
    /// equals `1 - |u11|^2 - |u12|^2` by unitarity.
    pub fn bath_leak_row1(&self, t: f64) -> Result<f64> {
        self.check_horizon(t)?;
        let row1 = self.propagator_row(0, t);
        Ok(row1[2..].iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest deviation of the rows of `exp(-i Omega t)` from orthonormality.
    pub fn unitarity_defect(&self, t: f64) -> Result<f64> {
        self.check_horizon(t)?;
        let row1 = self.propagator_row(0, t);
        let row2 = self.propagator_row(1, t);
        let n1: f64 = row1.iter().map(|z| z.norm_sqr()).sum();
        let n2: f64 = row2.iter().map(|z| z.norm_sqr()).sum();
        let cross: C64 = row1.iter().zip(&row2).map(|(a, b)| a.conj() * b).sum();
        Ok((n1 - 1.0).abs().max((n2 - 1.0).abs()).max(cross.norm()))
    }

    fn branch_vectors(&self, alpha0: C64, t: f64) -> (MicroAmplitudeVector, MicroAmplitudeVector) {
        let plus = MicroAmplitudeVector::system(alpha0, alpha0, self.n_modes);
        let minus = MicroAmplitudeVector::system(-alpha0, alpha0, self.n_modes);
        (self.propagate(&plus, t), self.propagate(&minus, t))
    }

    /// Exact decoherence factor of the SCS: the overlap of the two branch
    /// environments (mode 2 and every reservoir mode),
    /// `z(t) = exp( sum_{m>=2} [v-_m* v+_m - |v+_m|^2/2 - |v-_m|^2/2] )`.
    pub fn cat_coherence(&self, alpha0: C64, t: f64) -> Result<C64> {
        self.check_horizon(t)?;
        let (vp, vm) = self.branch_vectors(alpha0, t);
        let mut exponent = C64::new(0.0, 0.0);
        for m in 1..vp.0.len() {
            exponent += vm.0[m].conj() * vp.0[m]
                - 0.5 * (vp.0[m].norm_sqr() + vm.0[m].norm_sqr());
        }
        Ok(exponent.exp())
    }

    /// Exact SCS fidelity: the two-branch reduced state of mode 1 projected
    /// onto the static prepared SCS.
    pub fn micro_fidelity(&self, alpha0: C64, t: f64) -> Result<f64> {
        self.check_horizon(t)?;
        let (vp, vm) = self.branch_vectors(alpha0, t);
        let mut exponent = C64::new(0.0, 0.0);
        for m in 1..vp.0.len() {
            exponent += vm.0[m].conj() * vp.0[m]
                - 0.5 * (vp.0[m].norm_sqr() + vm.0[m].norm_sqr());
        }
        let z = exponent.exp();
        let catnorm_sq = 2.0 + 2.0 * (-2.0 * alpha0.norm_sqr()).exp();
        let overlap = |bra: C64, ket: C64| -> C64 {
            (bra.conj() * ket - 0.5 * (bra.norm_sqr() + ket.norm_sqr())).exp()
        };
        let bra_cat = |v: C64| -> C64 { overlap(alpha0, v) + overlap(-alpha0, v) };
        let tp = bra_cat(vp.0[0]);
        let tm = bra_cat(vm.0[0]);
        let raw = tp.norm_sqr() + tm.norm_sqr() + 2.0 * (z * tp * tm.conj()).re;
        Ok((raw / (catnorm_sq * catnorm_sq)).clamp(0.0, 1.0))
    }
}
