//! Truncated two-mode Fock-space master equation with cross decay and a flat
//! thermal occupation; the second, fully independent oracle.
//!
//! The generator is
//!
//! ```text
//! drho/dt = -i [H, rho]
//!   + sum_{jj'} gamma_{jj'} (nbar+1) [ a_{j'} rho a_j^+ - {a_j^+ a_{j'}, rho}/2 ]
//!   + sum_{jj'} gamma_{jj'}  nbar    [ a_j^+ rho a_{j'} - {a_{j'} a_j^+, rho}/2 ]
//! ```
//!
//! with the decay matrix `[[gamma11, gamma12], [gamma12, gamma22]]` and
//! `H = h1 n1 + h2 n2 + h12 (a1^+ a2 + a2^+ a1)` in the configured frame.
//! Its coherent-amplitude flow reproduces `d<a>/dt = -M <a>` with `M` from
//! [`PhysicalConfig::drift_constants`]; that mean-field bridge pins every
//! sign and factor against the closed-form route.
//!
//! Integration is classic fourth-order with per-interval step doubling:
//! substeps are halved until the step-doubled solutions agree elementwise
//! below the Richardson tolerance and the trace drift stays bounded.

use num_complex::Complex64 as C64;

use crate::linalg;
use crate::model::{Frame, PhysicalConfig};
use crate::{Error, Result};

/// Dense two-mode density matrix on a `d1 x d2` Fock truncation, stored
/// row-major as a `(d1 d2) x (d1 d2)` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    pub d1: usize,
    pub d2: usize,
    /// Time label (s).
    pub t: f64,
    pub data: Vec<C64>,
}

impl FockDensity {
    pub fn dim(&self) -> usize {
        self.d1 * self.d2
    }

    #[inline]
    pub fn idx(&self, n1: usize, n2: usize, m1: usize, m2: usize) -> usize {
        (n1 * self.d2 + n2) * self.d1 * self.d2 + m1 * self.d2 + m2
    }

    /// Vacuum `|00><00|`.
    pub fn vacuum(d1: usize, d2: usize) -> Self {
        let dd = d1 * d2;
        let mut data = vec![C64::new(0.0, 0.0); dd * dd];
        data[0] = C64::new(1.0, 0.0);
        FockDensity { d1, d2, t: 0.0, data }
    }

    /// Pure state from a product of mode vectors.
    pub fn product_pure(v1: &[C64], v2: &[C64]) -> Self {
        let (d1, d2) = (v1.len(), v2.len());
        let dd = d1 * d2;
        let mut psi = vec![C64::new(0.0, 0.0); dd];
        for n1 in 0..d1 {
            for n2 in 0..d2 {
                psi[n1 * d2 + n2] = v1[n1] * v2[n2];
            }
        }
        let mut data = vec![C64::new(0.0, 0.0); dd * dd];
        for r in 0..dd {
            for c in 0..dd {
                data[r * dd + c] = psi[r] * psi[c].conj();
            }
        }
        FockDensity { d1, d2, t: 0.0, data }
    }

    pub fn trace(&self) -> f64 {
        let dd = self.dim();
        (0..dd).map(|r| self.data[r * dd + r].re).sum()
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest elementwise deviation from `rho = rho^+`.
    pub fn hermiticity_defect(&self) -> f64 {
        let dd = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dd {
            for c in r..dd {
                worst = worst.max((self.data[r * dd + c] - self.data[c * dd + r].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue (slow; intended for spot checks).
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_min_eigenvalue(&self.data, self.dim())
    }

    pub fn expect_a1(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for n1 in 0..self.d1 - 1 {
            for n2 in 0..self.d2 {
                acc += ((n1 + 1) as f64).sqrt() * self.data[self.idx(n1 + 1, n2, n1, n2)];
            }
        }
        acc
    }

    pub fn expect_a2(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for n1 in 0..self.d1 {
            for n2 in 0..self.d2 - 1 {
                acc += ((n2 + 1) as f64).sqrt() * self.data[self.idx(n1, n2 + 1, n1, n2)];
            }
        }
        acc
    }

    pub fn expect_n1(&self) -> f64 {
        let mut acc = 0.0;
        for n1 in 0..self.d1 {
            for n2 in 0..self.d2 {
                acc += n1 as f64 * self.data[self.idx(n1, n2, n1, n2)].re;
            }
        }
        acc
    }

    pub fn expect_n2(&self) -> f64 {
        let mut acc = 0.0;
        for n1 in 0..self.d1 {
            for n2 in 0..self.d2 {
                acc += n2 as f64 * self.data[self.idx(n1, n2, n1, n2)].re;
            }
        }
        acc
    }

    /// Total population of the top Fock level of the given mode (1 or 2).
    pub fn top_level_population(&self, mode: usize) -> f64 {
        let mut acc = 0.0;
        match mode {
            1 => {
                for n2 in 0..self.d2 {
                    acc += self.data[self.idx(self.d1 - 1, n2, self.d1 - 1, n2)].re;
                }
            }
            2 => {
                for n1 in 0..self.d1 {
                    acc += self.data[self.idx(n1, self.d2 - 1, n1, self.d2 - 1)].re;
                }
            }
            _ => panic!("mode must be 1 or 2"),
        }
        acc
    }
}

/// Reduced single-mode density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDensity {
    pub d: usize,
    pub data: Vec<C64>,
}

impl ModeDensity {
    pub fn trace(&self) -> f64 {
        (0..self.d).map(|n| self.data[n * self.d + n].re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.d {
            for c in r..self.d {
                worst =
                    worst.max((self.data[r * self.d + c] - self.data[c * self.d + r].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_min_eigenvalue(&self.data, self.d)
    }
}

/// Partial trace over mode 2.
pub fn reduce_mode1(rho: &FockDensity) -> ModeDensity {
    let mut data = vec![C64::new(0.0, 0.0); rho.d1 * rho.d1];
    for n1 in 0..rho.d1 {
        for m1 in 0..rho.d1 {
            let mut acc = C64::new(0.0, 0.0);
            for n2 in 0..rho.d2 {
                acc += rho.data[rho.idx(n1, n2, m1, n2)];
            }
            data[n1 * rho.d1 + m1] = acc;
        }
    }
    ModeDensity { d: rho.d1, data }
}

/// Fock coefficients of `|alpha>` on a `d`-level truncation.
pub fn coherent_vector(d: usize, alpha: C64) -> Vec<C64> {
    let mut v = Vec::with_capacity(d);
    let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..d {
        if n > 0 {
            amp *= alpha / (n as f64).sqrt();
        }
        v.push(amp);
    }
    v
}

/// Normalized SCS `(|alpha0> + |-alpha0>)` on a `d`-level truncation.
///
/// Fails when the discarded tail mass exceeds `1e-10`.
pub fn cat_vector(d: usize, alpha0: C64) -> Result<Vec<C64>> {
    let plus = coherent_vector(d, alpha0);
    let minus = coherent_vector(d, -alpha0);
    let raw: Vec<C64> = plus.iter().zip(&minus).map(|(a, b)| a + b).collect();
    let truncated: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
    let full = 2.0 + 2.0 * (-2.0 * alpha0.norm_sqr()).exp();
    let tail = 1.0 - truncated / full;
    if tail > 1e-10 {
        return Err(Error::Truncation(alpha0.norm(), tail));
    }
    let norm = truncated.sqrt();
    Ok(raw.into_iter().map(|z| z / norm).collect())
}

/// Truncation dimension covering a `>= 6 sigma` Poisson tail for amplitudes
/// up to `alpha_max`, clamped to `[16, 40]`.
pub fn default_fock_dim(alpha_max: f64) -> usize {
    let a = alpha_max.abs();
    ((a * a + 6.0 * a + 8.0).ceil() as usize).clamp(16, 40)
}

/// Precomputed superoperator data for one [`PhysicalConfig`].
#[derive(Debug, Clone)]
pub struct Generator {
    d1: usize,
    d2: usize,
    h1: f64,
    h2: f64,
    h12: f64,
    gd11: f64,
    gd22: f64,
    gd12: f64,
    gu11: f64,
    gu22: f64,
    gu12: f64,
    sq: Vec<f64>,
    /// Conservative bound on the fastest rate in the truncated generator.
    rate_bound: f64,
    /// Decay-rate scale used by the trace-drift budget.
    gamma_scale: f64,
}

/// Build the master-equation generator on a `d1 x d2` truncation.
pub fn build_generator(cfg: &PhysicalConfig, d1: usize, d2: usize) -> Result<Generator> {
    cfg.checked()?;
    if d1 < 2 || d2 < 2 {
        return Err(Error::Config(format!(
            "Fock dimensions must be >= 2 each, got {d1} x {d2}"
        )));
    }
    let g12 = cfg.gamma12();
    let det = cfg.gamma11 * cfg.gamma22 - g12 * g12;
    if det < -1e-9 * (cfg.gamma11 * cfg.gamma22).max(1.0) {
        return Err(Error::NotDissipative(format!(
            "gamma11 gamma22 - gamma12^2 = {det}"
        )));
    }
    let chi = cfg.chi()?;
    let (w1, w2) = match cfg.frame {
        Frame::Rotating => (0.0, 0.0),
        Frame::Lab => (cfg.omega1, cfg.omega2),
    };
    let h1 = w1 + cfg.branch.sign() * chi + cfg.dshift1;
    let h2 = w2 + cfg.dshift2;
    let h12 = cfg.dshift12;
    let nb = cfg.nbar;
    let (gd11, gd22, gd12) = (
        cfg.gamma11 * (nb + 1.0),
        cfg.gamma22 * (nb + 1.0),
        g12 * (nb + 1.0),
    );
    let (gu11, gu22, gu12) = (cfg.gamma11 * nb, cfg.gamma22 * nb, g12 * nb);
    let dmax = d1.max(d2);
    let mut sq = Vec::with_capacity(dmax + 1);
    for k in 0..=dmax {
        sq.push((k as f64).sqrt());
    }
    let rate_bound = (gd11 + gu11 + gd12.abs() + gu12.abs()) * d1 as f64
        + (gd22 + gu22 + gd12.abs() + gu12.abs()) * d2 as f64
        + h1.abs() * d1 as f64
        + h2.abs() * d2 as f64
        + 2.0 * h12.abs() * ((d1 * d2) as f64).sqrt();
    let gamma_scale = cfg.gamma11.max(cfg.gamma22).max(1.0) * (nb + 1.0);
    Ok(Generator {
        d1,
        d2,
        h1,
        h2,
        h12,
        gd11,
        gd22,
        gd12,
        gu11,
        gu22,
        gu12,
        sq,
        rate_bound,
        gamma_scale,
    })
}

impl Generator {
    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    /// `out = L(rho)` on raw storage.
    pub fn apply_slice(&self, rho: &[C64], out: &mut [C64]) {
        let (d1, d2) = (self.d1, self.d2);
        let dd = d1 * d2;
        debug_assert_eq!(rho.len(), dd * dd);
        debug_assert_eq!(out.len(), dd * dd);
        let sq = &self.sq;
        let s_n1 = d2 * dd;
        let s_n2 = dd;
        let s_m1 = d2;
        let ac12 = -0.5 * (self.gd12 + self.gu12);
        let has_cross = self.gd12 != 0.0 || self.gu12 != 0.0;
        let has_up = self.gu11 != 0.0 || self.gu22 != 0.0;
        let has_h = self.h1 != 0.0 || self.h2 != 0.0;
        let has_h12 = self.h12 != 0.0;
        for n1 in 0..d1 {
            for n2 in 0..d2 {
                for m1 in 0..d1 {
                    for m2 in 0..d2 {
                        let i = (n1 * d2 + n2) * dd + m1 * d2 + m2;
                        let r = rho[i];
                        // Anticommutator and Hamiltonian parts diagonal in rho.
                        let mut diag_re =
                            -0.5 * self.gd11 * (n1 + m1) as f64 - 0.5 * self.gd22 * (n2 + m2) as f64;
                        if has_up {
                            // a a^+ of the truncated raising operator is zero
                            // at the closed top level, which keeps the channel
                            // exactly trace preserving.
                            let up_n1 = if n1 + 1 < d1 { (n1 + 1) as f64 } else { 0.0 };
                            let up_m1 = if m1 + 1 < d1 { (m1 + 1) as f64 } else { 0.0 };
                            let up_n2 = if n2 + 1 < d2 { (n2 + 1) as f64 } else { 0.0 };
                            let up_m2 = if m2 + 1 < d2 { (m2 + 1) as f64 } else { 0.0 };
                            diag_re += -0.5 * self.gu11 * (up_n1 + up_m1)
                                - 0.5 * self.gu22 * (up_n2 + up_m2);
                        }
                        let diag_im = if has_h {
                            -(self.h1 * (n1 as f64 - m1 as f64) + self.h2 * (n2 as f64 - m2 as f64))
                        } else {
                            0.0
                        };
                        let mut acc = C64::new(diag_re, diag_im) * r;

                        // Jump terms of the diagonal decay channels.
                        if n1 + 1 < d1 && m1 + 1 < d1 {
                            acc += self.gd11 * sq[n1 + 1] * sq[m1 + 1] * rho[i + s_n1 + s_m1];
                        }
                        if n2 + 1 < d2 && m2 + 1 < d2 {
                            acc += self.gd22 * sq[n2 + 1] * sq[m2 + 1] * rho[i + s_n2 + 1];
                        }
                        if has_up {
                            if n1 > 0 && m1 > 0 {
                                acc += self.gu11 * sq[n1] * sq[m1] * rho[i - s_n1 - s_m1];
                            }
                            if n2 > 0 && m2 > 0 {
                                acc += self.gu22 * sq[n2] * sq[m2] * rho[i - s_n2 - 1];
                            }
                        }

                        if has_cross {
                            // Cross jumps.
                            if n2 + 1 < d2 && m1 + 1 < d1 {
                                acc += self.gd12 * sq[n2 + 1] * sq[m1 + 1] * rho[i + s_n2 + s_m1];
                            }
                            if n1 + 1 < d1 && m2 + 1 < d2 {
                                acc += self.gd12 * sq[n1 + 1] * sq[m2 + 1] * rho[i + s_n1 + 1];
                            }
                            if self.gu12 != 0.0 {
                                if n1 > 0 && m2 > 0 {
                                    acc += self.gu12 * sq[n1] * sq[m2] * rho[i - s_n1 - 1];
                                }
                                if n2 > 0 && m1 > 0 {
                                    acc += self.gu12 * sq[n2] * sq[m1] * rho[i - s_n2 - s_m1];
                                }
                            }
                            // Cross anticommutator, shared by both channels.
                            if n1 > 0 && n2 + 1 < d2 {
                                acc += ac12 * sq[n1] * sq[n2 + 1] * rho[i - s_n1 + s_n2];
                            }
                            if n2 > 0 && n1 + 1 < d1 {
                                acc += ac12 * sq[n2] * sq[n1 + 1] * rho[i + s_n1 - s_n2];
                            }
                            if m1 + 1 < d1 && m2 > 0 {
                                acc += ac12 * sq[m1 + 1] * sq[m2] * rho[i + s_m1 - 1];
                            }
                            if m1 > 0 && m2 + 1 < d2 {
                                acc += ac12 * sq[m1] * sq[m2 + 1] * rho[i - s_m1 + 1];
                            }
                        }

                        if has_h12 {
                            // -i h12 [a1^+ a2 + a2^+ a1, rho]
                            let mih = C64::new(0.0, -self.h12);
                            if n1 > 0 && n2 + 1 < d2 {
                                acc += mih * sq[n1] * sq[n2 + 1] * rho[i - s_n1 + s_n2];
                            }
                            if n2 > 0 && n1 + 1 < d1 {
                                acc += mih * sq[n2] * sq[n1 + 1] * rho[i + s_n1 - s_n2];
                            }
                            if m1 + 1 < d1 && m2 > 0 {
                                acc -= mih * sq[m1 + 1] * sq[m2] * rho[i + s_m1 - 1];
                            }
                            if m1 > 0 && m2 + 1 < d2 {
                                acc -= mih * sq[m1] * sq[m2 + 1] * rho[i - s_m1 + 1];
                            }
                        }

                        out[i] = acc;
                    }
                }
            }
        }
    }

    /// `L(rho)` as a new density-like matrix (the first integrator stage).
    pub fn apply(&self, rho: &FockDensity) -> FockDensity {
        assert_eq!((rho.d1, rho.d2), (self.d1, self.d2));
        let mut out = rho.clone();
        self.apply_slice(&rho.data, &mut out.data);
        out
    }

    /// `(d<a1>/dt, d<a2>/dt)` at the given state, from one generator
    /// application. Equals `-M (a1, a2)` for coherent states.
    pub fn mean_amplitude_derivative(&self, rho: &FockDensity) -> (C64, C64) {
        let deriv = self.apply(rho);
        (deriv.expect_a1(), deriv.expect_a2())
    }
}

/// Step-control settings for [`evolve_observed`].
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Trace-drift budget per unit of `gamma t`.
    pub trace_tol: f64,
    /// Elementwise step-doubling agreement required per grid interval.
    pub richardson_tol: f64,
    /// Give up after this many halvings of the substep size.
    pub max_halvings: u32,
    /// Initial substep size as a fraction of the inverse rate bound.
    pub rate_dt_fraction: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            trace_tol: 1e-9,
            richardson_tol: 1e-8,
            max_halvings: 10,
            rate_dt_fraction: 0.4,
        }
    }
}

/// Health record of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveReport {
    pub total_substeps: usize,
    pub max_richardson: f64,
    pub max_trace_drift: f64,
    /// Set when the top Fock level of either mode ever holds more than 1e-6.
    pub truncation_flagged: bool,
}

struct Rk4Buffers {
    stage: Vec<C64>,
    k: Vec<C64>,
    acc: Vec<C64>,
}

fn rk4_steps(gen: &Generator, rho: &mut [C64], dt: f64, n: usize, buf: &mut Rk4Buffers) {
    let len = rho.len();
    let Rk4Buffers { stage, k, acc } = buf;
    for _ in 0..n {
        gen.apply_slice(rho, k);
        for i in 0..len {
            acc[i] = rho[i] + dt / 6.0 * k[i];
            stage[i] = rho[i] + 0.5 * dt * k[i];
        }
        gen.apply_slice(stage, k);
        for i in 0..len {
            acc[i] += dt / 3.0 * k[i];
            stage[i] = rho[i] + 0.5 * dt * k[i];
        }
        gen.apply_slice(stage, k);
        for i in 0..len {
            acc[i] += dt / 3.0 * k[i];
            stage[i] = rho[i] + dt * k[i];
        }
        gen.apply_slice(stage, k);
        for i in 0..len {
            rho[i] = acc[i] + dt / 6.0 * k[i];
        }
    }
}

/// Integrate over `t_grid`, invoking the observer at every grid point.
///
/// `rho0` is taken to live at `t_grid[0]`; the grid must be strictly
/// increasing.
pub fn evolve_observed(
    rho0: &FockDensity,
    gen: &Generator,
    t_grid: &[f64],
    opts: &EvolveOptions,
    mut observe: impl FnMut(f64, &FockDensity),
) -> Result<EvolveReport> {
    if t_grid.is_empty() {
        return Err(Error::Config("time grid must not be empty".into()));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Config("time grid must be strictly increasing".into()));
        }
    }
    assert_eq!((rho0.d1, rho0.d2), gen.dims());
    let len = rho0.data.len();
    let mut current = rho0.clone();
    current.t = t_grid[0];
    let mut report = EvolveReport {
        total_substeps: 0,
        max_richardson: 0.0,
        max_trace_drift: 0.0,
        truncation_flagged: false,
    };
    let flag_truncation = |rho: &FockDensity, rep: &mut EvolveReport| {
        if rho.top_level_population(1) > 1e-6 || rho.top_level_population(2) > 1e-6 {
            rep.truncation_flagged = true;
        }
    };
    flag_truncation(&current, &mut report);
    observe(current.t, &current);

    let dt0 = opts.rate_dt_fraction / gen.rate_bound.max(1.0);
    let mut buf = Rk4Buffers {
        stage: vec![C64::new(0.0, 0.0); len],
        k: vec![C64::new(0.0, 0.0); len],
        acc: vec![C64::new(0.0, 0.0); len],
    };

    let dim = rho0.dim();
    let trace_of = |data: &[C64]| -> f64 { (0..dim).map(|r| data[r * dim + r].re).sum() };
    // The generator is traceless; the budget guards preservation of the
    // initial trace, whatever normalization the caller chose.
    let trace0 = trace_of(&current.data);

    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        let budget = opts.trace_tol * (gen.gamma_scale * (w[1] - t_grid[0])).max(1.0);
        let mut n = (span / dt0).ceil().max(1.0) as usize;
        // Coarse pass, then step-doubled passes until both the doubling
        // agreement and the trace budget hold.
        let mut coarse = current.data.clone();
        rk4_steps(gen, &mut coarse, span / n as f64, n, &mut buf);
        report.total_substeps += n;
        let mut halvings = 0;
        loop {
            let mut fine = current.data.clone();
            rk4_steps(gen, &mut fine, span / (2 * n) as f64, 2 * n, &mut buf);
            report.total_substeps += 2 * n;
            let err = coarse
                .iter()
                .zip(&fine)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let drift = (trace_of(&fine) - trace0).abs();
            if err <= opts.richardson_tol && drift <= budget {
                report.max_richardson = report.max_richardson.max(err);
                report.max_trace_drift = report.max_trace_drift.max(drift);
                current.data = fine;
                break;
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(Error::StepControl(format!(
                    "interval [{}, {}]: doubling residual {err:.3e}, trace drift {drift:.3e} \
                     (budget {budget:.3e}) after {halvings} halvings",
                    w[0], w[1]
                )));
            }
            coarse = fine;
            n *= 2;
        }
        current.t = w[1];
        flag_truncation(&current, &mut report);
        observe(current.t, &current);
    }
    Ok(report)
}

/// Convenience wrapper collecting the full trajectory (small problems only).
pub fn evolve(rho0: &FockDensity, gen: &Generator, t_grid: &[f64]) -> Result<Vec<FockDensity>> {
    let mut states = Vec::with_capacity(t_grid.len());
    evolve_observed(rho0, gen, t_grid, &EvolveOptions::default(), |_, rho| {
        states.push(rho.clone());
    })?;
    Ok(states)
}

/// `F = <Psi| rho1 |Psi>` against the static SCS with amplitude `alpha0`.
pub fn oracle_fidelity(rho1: &ModeDensity, alpha0: C64) -> Result<f64> {
    let psi = cat_vector(rho1.d, alpha0)?;
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..rho1.d {
        for m in 0..rho1.d {
            acc += psi[n].conj() * rho1.data[n * rho1.d + m] * psi[m];
        }
    }
    let f = acc.re;
    if !(-1e-9..=1.0 + 1e-9).contains(&f) {
        return Err(Error::FidelityRange(f));
    }
    Ok(f.clamp(0.0, 1.0))
}
