//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured margins (visible with `--nocapture`).
//!
//! The reference configuration throughout is damping times T1 = 1 ms and
//! T2 = 0.9 ms, amplitudes {0.5, 1.0, 1.5, 2.0}, zero temperature, rotating
//! frame, with the cross-decay overlap run at both kappa = 0 and kappa = 1.

use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use bicavity::lindblad::{
    self, build_generator, cat_vector, coherent_vector, default_fock_dim, oracle_fidelity,
    reduce_mode1, EvolveOptions, FockDensity,
};
use bicavity::micro_bath::build_bath;
use bicavity::model::{Branch, Frame, PhysicalConfig};
use bicavity::propagator::{mixing_closed_form, mixing_coefficients, MixingMatrix};
use bicavity::states::{decoherence_factor, evolve_branched, fidelity_scs, BranchedState};

const ALPHAS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn base_config(kappa: f64) -> PhysicalConfig {
    PhysicalConfig {
        kappa,
        ..PhysicalConfig::default()
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Criterion 1: the fidelity of the prepared SCS is exactly 1 at t = 0.
#[test]
fn criterion_1_initial_fidelity_is_unity() {
    let mut worst = 0.0f64;
    for kappa in [0.0, 0.5, 1.0] {
        for branch in [Branch::None, Branch::Ground, Branch::Excited] {
            for frame in [Frame::Rotating, Frame::Lab] {
                let cfg = PhysicalConfig {
                    kappa,
                    branch,
                    frame,
                    g: TAU * 25e3,
                    delta1: TAU * 250e3,
                    omega1: TAU * 51.1e9,
                    omega2: TAU * 51.0e9,
                    ..PhysicalConfig::default()
                };
                let dc = cfg.drift_constants().unwrap();
                let mix = mixing_coefficients(&dc, 0.0);
                for alpha in ALPHAS {
                    let f = fidelity_scs(&mix, c(alpha, 0.0)).unwrap();
                    worst = worst.max((f - 1.0).abs());
                }
            }
        }
    }
    assert!(worst < 1e-12, "max |F(0) - 1| = {worst:.3e}");
    println!("criterion 1 (F(0) = 1 within 1e-12): PASS, max deviation {worst:.3e}");
}

fn random_valid_config(rng: &mut impl rand::Rng) -> PhysicalConfig {
    let gamma11: f64 = rng.gen_range(10.0..1e4);
    let gamma22: f64 = rng.gen_range(10.0..1e4);
    let kappa: f64 = rng.gen_range(-1.0..1.0);
    let g12 = kappa * (gamma11 * gamma22).sqrt();
    let room = (gamma11 * gamma22 - g12 * g12).max(0.0).sqrt() / 2.0;
    PhysicalConfig {
        g: rng.gen_range(0.0..1e5),
        delta1: rng.gen_range(1e5..1e6),
        branch: match rng.gen_range(0..3) {
            0 => Branch::None,
            1 => Branch::Ground,
            _ => Branch::Excited,
        },
        gamma11,
        gamma22,
        kappa,
        dshift1: rng.gen_range(-1e4..1e4),
        dshift2: rng.gen_range(-1e4..1e4),
        dshift12: rng.gen_range(-0.9..0.9) * room,
        frame: if rng.gen_bool(0.5) { Frame::Rotating } else { Frame::Lab },
        omega1: rng.gen_range(-1e4..1e4),
        omega2: rng.gen_range(-1e4..1e4),
        ..PhysicalConfig::default()
    }
}

/// Criterion 2: the printed hyperbolic expressions agree with the matrix
/// exponential to 1e-10, including near-degenerate splittings.
#[test]
fn criterion_2_closed_form_regression() {
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};
    let mut rng = SmallRng::seed_from_u64(0xacce97);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let cfg = if i < 90 {
            random_valid_config(&mut rng)
        } else {
            // Near-degenerate: equal rates, vanishing cross coupling.
            let gamma = rng.gen_range(100.0..5e3);
            PhysicalConfig {
                gamma11: gamma,
                gamma22: gamma * (1.0 + rng.gen_range(-1e-9..1e-9)),
                kappa: rng.gen_range(-1e-9..1e-9),
                ..PhysicalConfig::default()
            }
        };
        let dc = cfg.drift_constants().unwrap();
        for _ in 0..200 {
            let t = rng.gen_range(0.0..5e-3);
            let a = mixing_coefficients(&dc, t);
            let b = mixing_closed_form(&dc, t);
            worst = worst.max(a.max_abs_diff(&b));
        }
    }
    assert!(worst < 1e-10, "max elementwise deviation = {worst:.3e}");
    println!("criterion 2 (closed-form regression <= 1e-10): PASS, max deviation {worst:.3e}");
}

/// Criterion 3: the discretized system+bath oracle reproduces the closed-form
/// mixing coefficients, decoherence factor, and fidelity in the flat-spectrum
/// regime (N = 800 modes over W = 2 pi 1e5 rad/s, t in [0, 3 ms]).
#[test]
fn criterion_3_micro_oracle_equivalence() {
    let band = TAU * 1e5;
    let mut worst_u = 0.0f64;
    let mut worst_z = 0.0f64;
    let mut worst_f = 0.0f64;
    for kappa in [0.0, 1.0] {
        let cfg = base_config(kappa);
        let bath = build_bath(&cfg, 800, band, 3e-3).unwrap();
        let dc = cfg.drift_constants().unwrap();
        for &t in linspace(0.0, 3e-3, 61).iter().skip(1) {
            let micro = bath.extract_mixing(t).unwrap();
            let ana = mixing_coefficients(&dc, t);
            for (m, a) in [(micro.u11, ana.u11), (micro.u12, ana.u12)] {
                let dev = (m.norm() - a.norm()).abs();
                // Relative deviation, floored at 10% of the unit row scale: a
                // coefficient passing through zero carries a fixed flat-band
                // offset ~|C|/W, so a strict pointwise ratio diverges as
                // t -> 0 for any discretization.
                let rel = dev / a.norm().max(0.1);
                worst_u = worst_u.max(rel);
            }
        }
        for &t in linspace(0.0, 3e-3, 31).iter().skip(1) {
            let ana_mix = mixing_coefficients(&dc, t);
            for alpha in ALPHAS {
                let a0 = c(alpha, 0.0);
                let z_ana = decoherence_factor(&ana_mix, a0);
                if z_ana.norm() > 1e-3 {
                    let z_micro = bath.cat_coherence(a0, t).unwrap();
                    worst_z = worst_z.max((z_ana - z_micro).norm() / z_ana.norm());
                }
                let f_ana = fidelity_scs(&ana_mix, a0).unwrap();
                let f_micro = bath.micro_fidelity(a0, t).unwrap();
                worst_f = worst_f.max((f_ana - f_micro).abs());
            }
        }
    }
    assert!(worst_u <= 0.02, "max |u| deviation = {worst_u:.4}");
    assert!(worst_z <= 0.02, "max Z deviation = {worst_z:.4}");
    assert!(worst_f <= 0.02, "max F deviation = {worst_f:.4}");
    println!(
        "criterion 3 (micro-oracle equivalence, 2%): PASS, |u| {worst_u:.2e}, Z {worst_z:.2e}, F {worst_f:.2e}"
    );
}

fn lindblad_fidelities(cfg: &PhysicalConfig, alpha: f64, grid: &[f64]) -> Vec<f64> {
    let d = default_fock_dim(alpha);
    let gen = build_generator(cfg, d, d).unwrap();
    let a0 = c(alpha, 0.0);
    let rho0 = FockDensity::product_pure(&cat_vector(d, a0).unwrap(), &coherent_vector(d, a0));
    let mut fids = Vec::with_capacity(grid.len());
    lindblad::evolve_observed(&rho0, &gen, grid, &EvolveOptions::default(), |_, rho| {
        fids.push(oracle_fidelity(&reduce_mode1(rho), a0).unwrap());
    })
    .unwrap();
    fids
}

/// Criterion 4: the Fock-space master equation reproduces the closed-form
/// SCS fidelity to 5e-3, and its coherent-amplitude flow matches the drift
/// matrix to 1e-10.
#[test]
fn criterion_4_lindblad_oracle_equivalence() {
    // Mean-amplitude bridge, evaluated from one generator application (the
    // first integrator stage) and from a one-step finite difference.
    let mut worst_bridge = 0.0f64;
    let mut worst_fd = 0.0f64;
    for kappa in [0.0, 1.0] {
        let cfg = base_config(kappa);
        let d = 18;
        let gen = build_generator(&cfg, d, d).unwrap();
        let rho = FockDensity::product_pure(
            &coherent_vector(d, c(1.0, 0.0)),
            &coherent_vector(d, c(0.7, 0.2)),
        );
        let (a1, a2) = (rho.expect_a1(), rho.expect_a2());
        let dc = cfg.drift_constants().unwrap();
        let (da1, da2) = gen.mean_amplitude_derivative(&rho);
        let expect1 = -(dc.a * a1 + dc.c * a2);
        let expect2 = -(dc.c.conj() * a1 + dc.b * a2);
        worst_bridge = worst_bridge
            .max((da1 - expect1).norm() / expect1.norm())
            .max((da2 - expect2).norm() / expect2.norm());

        let h = 1e-9;
        let stepped = lindblad::evolve(&rho, &gen, &[0.0, h]).unwrap();
        let slope = (stepped[1].expect_a1() - a1) / h;
        worst_fd = worst_fd.max((slope - expect1).norm() / expect1.norm());
    }
    assert!(worst_bridge < 1e-10, "bridge deviation {worst_bridge:.3e}");
    assert!(worst_fd < 1e-5, "finite-difference deviation {worst_fd:.3e}");

    // Fidelity equivalence over the time grid.
    let mut grid = linspace(0.0, 3e-3, 13);
    for extra in [0.05e-3, 0.15e-3, 0.35e-3] {
        grid.push(extra);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut worst_f = 0.0f64;
    for kappa in [0.0, 1.0] {
        let cfg = base_config(kappa);
        let dc = cfg.drift_constants().unwrap();
        for alpha in [1.0, 2.0] {
            let fids = lindblad_fidelities(&cfg, alpha, &grid);
            for (t, f_lind) in grid.iter().zip(&fids) {
                let f_ana = fidelity_scs(&mixing_coefficients(&dc, *t), c(alpha, 0.0)).unwrap();
                worst_f = worst_f.max((f_ana - f_lind).abs());
            }
        }
    }
    assert!(worst_f <= 5e-3, "max |F_analytic - F_lindblad| = {worst_f:.3e}");
    println!(
        "criterion 4 (master-equation equivalence): PASS, bridge {worst_bridge:.2e}, \
         finite-diff {worst_fd:.2e}, F {worst_f:.2e}"
    );
}

fn first_crossing(grid: &[f64], values: &[f64], level: f64) -> f64 {
    for w in 0..grid.len() - 1 {
        if values[w] >= level && values[w + 1] < level {
            let frac = (values[w] - level) / (values[w] - values[w + 1]);
            return grid[w] + frac * (grid[w + 1] - grid[w]);
        }
    }
    panic!("no crossing of {level} found");
}

/// Criterion 5: smaller amplitudes keep fidelity longer (pointwise over the
/// full window), and the three routes agree on when F(alpha = 1) first
/// reaches 0.9.
#[test]
fn criterion_5_ordering_and_t90_agreement() {
    // Pointwise ordering on a dense grid.
    for kappa in [0.0, 1.0] {
        let dc = base_config(kappa).drift_constants().unwrap();
        for &t in linspace(1e-5, 3e-3, 300).iter() {
            let mix = mixing_coefficients(&dc, t);
            let fs: Vec<f64> = ALPHAS
                .iter()
                .map(|&a| fidelity_scs(&mix, c(a, 0.0)).unwrap())
                .collect();
            for w in fs.windows(2) {
                assert!(
                    w[0] > w[1],
                    "ordering violated at t = {t}, kappa = {kappa}: {fs:?}"
                );
            }
        }
    }

    // t at F = 0.9 for alpha = 1: closed form vs both oracles within 5%.
    let mut margins = Vec::new();
    for kappa in [0.0, 1.0] {
        let cfg = base_config(kappa);
        let dc = cfg.drift_constants().unwrap();
        let a0 = c(1.0, 0.0);

        let mut lo = 0.0f64;
        let mut hi = 3e-4;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let f = fidelity_scs(&mixing_coefficients(&dc, mid), a0).unwrap();
            if f > 0.9 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t_ana = 0.5 * (lo + hi);

        let grid = linspace(0.0, 3e-4, 151);
        let bath = build_bath(&cfg, 400, TAU * 1e5, 3e-4).unwrap();
        let f_micro: Vec<f64> = grid
            .iter()
            .map(|&t| bath.micro_fidelity(a0, t).unwrap())
            .collect();
        let t_micro = first_crossing(&grid, &f_micro, 0.9);

        let f_lind = lindblad_fidelities(&cfg, 1.0, &grid);
        let t_lind = first_crossing(&grid, &f_lind, 0.9);

        let dev_micro = (t_micro - t_ana).abs() / t_ana;
        let dev_lind = (t_lind - t_ana).abs() / t_ana;
        assert!(dev_micro < 0.05, "kappa {kappa}: micro t90 off by {dev_micro:.3}");
        assert!(dev_lind < 0.05, "kappa {kappa}: lindblad t90 off by {dev_lind:.3}");
        margins.push(dev_micro.max(dev_lind));
    }
    println!(
        "criterion 5 (ordering + t90 agreement within 5%): PASS, margins {:?}",
        margins.iter().map(|m| format!("{m:.2e}")).collect::<Vec<_>>()
    );
}

/// Criterion 6: physicality of every route.
#[test]
fn criterion_6_physicality() {
    // Master-equation trajectory invariants.
    let cfg = base_config(1.0);
    let d = 16;
    let gen = build_generator(&cfg, d, d).unwrap();
    let a0 = c(1.0, 0.0);
    let rho0 = FockDensity::product_pure(&cat_vector(d, a0).unwrap(), &coherent_vector(d, a0));
    let states = lindblad::evolve(&rho0, &gen, &[0.0, 0.4e-3, 1.1e-3, 2.4e-3]).unwrap();
    for s in &states {
        assert!((s.trace() - 1.0).abs() < 1e-8, "trace {}", s.trace());
        assert!(s.hermiticity_defect() < 1e-10);
        assert!(s.min_eigenvalue() >= -1e-8);
    }

    // Micro propagator unitarity.
    let bath = build_bath(&cfg, 400, TAU * 1e5, 1.5e-3).unwrap();
    for t in [1e-4, 0.7e-3, 1.5e-3] {
        assert!(bath.unitarity_defect(t).unwrap() < 1e-10);
    }

    // Branched-density weighted coherence matrices stay PSD.
    let dc = cfg.drift_constants().unwrap();
    for t in [0.0, 0.3e-3, 1.2e-3, 2.9e-3] {
        let mix = mixing_coefficients(&dc, t);
        for alpha in ALPHAS {
            let bd = evolve_branched(&mix, &BranchedState::cat(c(alpha, 0.0)), 0.0).unwrap();
            let g = bd.gram();
            let min = bicavity::linalg::hermitian_min_eigenvalue(&g, bd.len());
            assert!(min >= -1e-10, "min eigenvalue {min}");
        }
    }

    // Emitted fidelities within [0, 1]; Husimi field nonnegative.
    for kappa in [0.0, 1.0] {
        let dc = base_config(kappa).drift_constants().unwrap();
        for &t in linspace(0.0, 3e-3, 121).iter() {
            let mix = mixing_coefficients(&dc, t);
            for alpha in ALPHAS {
                let f = fidelity_scs(&mix, c(alpha, 0.0)).unwrap();
                assert!((0.0..=1.0).contains(&f));
            }
        }
    }
    let mix = mixing_coefficients(&dc, 0.6e-3);
    let bd = evolve_branched(&mix, &BranchedState::cat(c(2.0, 0.0)), 0.0).unwrap();
    let grid = bicavity::states::GridSpec::new(c(0.0, 0.0), 6.0, 81);
    let q = bicavity::states::husimi_q(&bd, &grid, 0.0).unwrap();
    assert!(q.min() >= 0.0);
    assert!((q.integral() - 1.0).abs() < 1e-3);

    println!("criterion 6 (physicality suite): PASS");
}

/// Criterion 7: known limits.
#[test]
fn criterion_7_known_limits() {
    // kappa = 0 reduces Z(t) to the single-mode law exactly.
    let dc = base_config(0.0).drift_constants().unwrap();
    let gamma = 1e3;
    let mut worst_z = 0.0f64;
    for &t in linspace(0.0, 3e-3, 100).iter() {
        let mix = mixing_coefficients(&dc, t);
        for alpha in ALPHAS {
            let z = decoherence_factor(&mix, c(alpha, 0.0));
            let law = (-2.0 * alpha * alpha * (1.0 - (-gamma * t).exp())).exp();
            worst_z = worst_z.max((z - c(law, 0.0)).norm());
        }
    }
    assert!(worst_z < 1e-12, "Z law deviation {worst_z:.3e}");

    // Long-time limit: F -> 2 e^{-1} / (1 + e^{-2}) for alpha = 1.
    let expect = 2.0 * (-1.0f64).exp() / (1.0 + (-2.0f64).exp());
    let dead = MixingMatrix {
        t: 1.0,
        u11: c(0.0, 0.0),
        u12: c(0.0, 0.0),
        u21: c(0.0, 0.0),
        u22: c(0.0, 0.0),
    };
    let f_limit = fidelity_scs(&dead, c(1.0, 0.0)).unwrap();
    assert!((f_limit - expect).abs() < 1e-10, "analytic limit {f_limit}");

    // Same limit from the exact oracle, within 2%, at gamma t = 5 (the
    // approach to the limit itself contributes ~e^{-5}).
    let cfg = base_config(0.0);
    let bath = build_bath(&cfg, 1000, TAU * 1e5, 5e-3).unwrap();
    let f_micro = bath.micro_fidelity(c(1.0, 0.0), 5e-3).unwrap();
    assert!(
        (f_micro - expect).abs() < 0.02 * expect,
        "micro long-time fidelity {f_micro} vs {expect}"
    );

    // Full overlap with equal rates: the antisymmetric mode is untouched.
    let cfg = PhysicalConfig {
        gamma11: 1e3,
        gamma22: 1e3,
        kappa: 1.0,
        ..PhysicalConfig::default()
    };
    let dc = cfg.drift_constants().unwrap();
    let mut worst_df = 0.0f64;
    for &t in linspace(0.0, 3e-3, 100).iter() {
        let mix = mixing_coefficients(&dc, t);
        worst_df = worst_df.max(((mix.u11 - mix.u12).norm() - 1.0).abs());
    }
    assert!(worst_df < 1e-10, "decoherence-free deviation {worst_df:.3e}");

    println!(
        "criterion 7 (known limits): PASS, Z law {worst_z:.2e}, analytic limit {:.2e}, \
         micro limit {:.2e}, DF mode {worst_df:.2e}",
        (f_limit - expect).abs(),
        (f_micro - expect).abs()
    );
}
