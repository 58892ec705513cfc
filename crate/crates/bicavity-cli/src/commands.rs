//! The four data-emission commands. All tables start with a `#` header
//! echoing the resolved configuration, carry one column-name row, and print
//! floats with 12 significant digits so reruns are byte-identical and
//! regression-diffable.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use bicavity::lindblad::{
    self, build_generator, cat_vector, coherent_vector, default_fock_dim, oracle_fidelity,
    reduce_mode1, EvolveOptions, FockDensity,
};
use bicavity::micro_bath::build_bath;
use bicavity::propagator::{mixing_coefficients, MixingMatrix};
use bicavity::states::{
    cat_observables, decoherence_factor, evolve_branched, fidelity_scs, husimi_q, BranchedState,
    GridSpec,
};

use crate::config::{Oracle, RunConfig};

/// Failure modes mapped to process exit codes.
#[derive(Debug)]
pub enum CmdError {
    /// Exit 2: bad configuration or refused request.
    Config(String),
    /// Exit 1: an oracle-agreement threshold was missed.
    Acceptance(String),
    /// Exit 3: numerical invariant violated.
    Numerical(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Acceptance(_) => 1,
            CmdError::Config(_) => 2,
            CmdError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Config(m) | CmdError::Acceptance(m) | CmdError::Numerical(m) => m,
        }
    }
}

fn lift(err: bicavity::Error) -> CmdError {
    use bicavity::Error as E;
    match err {
        E::Config(_) | E::ZeroDetuning | E::NegativeNbar(_) | E::Horizon { .. }
        | E::ThermalUnsupported(_) | E::Truncation(..) => CmdError::Config(err.to_string()),
        E::DegenerateState | E::FidelityRange(_) | E::NotDissipative(_) | E::StepControl(_) => {
            CmdError::Numerical(err.to_string())
        }
    }
}

fn sig12(x: f64) -> String {
    // Normalize -0.0 so t = 0 rows read cleanly.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn time_grid(cfg: &RunConfig) -> Vec<f64> {
    (0..cfg.t_steps)
        .map(|i| cfg.t_max * i as f64 / (cfg.t_steps - 1) as f64)
        .collect()
}

fn header(cfg: &RunConfig, command: &str) -> String {
    format!("# bicavity {command}\n{}", cfg.echo())
}

/// Strict mode rejects any mixing matrix whose rows exceed contraction by
/// more than rounding.
fn strict_check(cfg: &RunConfig, mix: &MixingMatrix) -> Result<(), CmdError> {
    if cfg.strict && mix.contraction_excess() > 1e-9 {
        return Err(CmdError::Numerical(format!(
            "row contraction exceeded by {:.3e} at t = {}",
            mix.contraction_excess(),
            mix.t
        )));
    }
    Ok(())
}

fn lindblad_fidelity_column(
    cfg: &RunConfig,
    alpha: C64,
    grid: &[f64],
) -> Result<Vec<f64>, CmdError> {
    let d = cfg.fock_dim.unwrap_or_else(|| default_fock_dim(alpha.norm()));
    let gen = build_generator(&cfg.physical, d, d).map_err(lift)?;
    let cat = cat_vector(d, alpha).map_err(lift)?;
    let rho0 = FockDensity::product_pure(&cat, &coherent_vector(d, alpha));
    let mut fids = Vec::with_capacity(grid.len());
    let mut fid_err = None;
    let report = lindblad::evolve_observed(
        &rho0,
        &gen,
        grid,
        &EvolveOptions::default(),
        |_, rho| match oracle_fidelity(&reduce_mode1(rho), alpha) {
            Ok(f) => fids.push(f),
            Err(e) => fid_err = Some(e),
        },
    )
    .map_err(lift)?;
    if let Some(e) = fid_err {
        return Err(lift(e));
    }
    if cfg.strict && report.truncation_flagged {
        return Err(CmdError::Numerical(format!(
            "Fock truncation health flag raised at dim {d} for alpha = {alpha} \
             (top-level population exceeded 1e-6)"
        )));
    }
    Ok(fids)
}

/// `fidelity-sweep`: one row per (t, alpha) with the closed-form fidelity and
/// optional oracle columns.
pub fn fidelity_sweep(cfg: &RunConfig) -> Result<String, CmdError> {
    let dc = cfg.physical.drift_constants().map_err(lift)?;
    let grid = time_grid(cfg);
    let with_micro = cfg.oracles.contains(&Oracle::Micro);
    let with_lindblad = cfg.oracles.contains(&Oracle::Lindblad);

    let bath = if with_micro {
        Some(build_bath(&cfg.physical, cfg.bath_n, cfg.bath_w, cfg.t_max).map_err(lift)?)
    } else {
        None
    };

    // Closed-form column, t-major then alpha.
    let mut analytic = vec![vec![0.0; cfg.alphas.len()]; grid.len()];
    for (ti, &t) in grid.iter().enumerate() {
        let mix = mixing_coefficients(&dc, t);
        strict_check(cfg, &mix)?;
        for (ai, &alpha) in cfg.alphas.iter().enumerate() {
            let obs = cat_observables(&mix, alpha, cfg.physical.nbar).map_err(lift)?;
            analytic[ti][ai] = obs.fidelity;
        }
    }

    let micro: Option<Vec<Vec<f64>>> = match &bath {
        Some(bath) => {
            let columns: Result<Vec<Vec<f64>>, CmdError> = cfg
                .alphas
                .par_iter()
                .map(|&alpha| {
                    grid.iter()
                        .map(|&t| bath.micro_fidelity(alpha, t).map_err(lift))
                        .collect()
                })
                .collect();
            Some(transpose(columns?))
        }
        None => None,
    };

    let lindblad_cols: Option<Vec<Vec<f64>>> = if with_lindblad {
        let columns: Result<Vec<Vec<f64>>, CmdError> = cfg
            .alphas
            .par_iter()
            .map(|&alpha| lindblad_fidelity_column(cfg, alpha, &grid))
            .collect();
        Some(transpose(columns?))
    } else {
        None
    };

    let mut out = header(cfg, "fidelity-sweep");
    out.push_str("t,alpha");
    out.push_str(",F_analytic");
    if micro.is_some() {
        out.push_str(",F_micro");
    }
    if lindblad_cols.is_some() {
        out.push_str(",F_lindblad");
    }
    out.push('\n');
    for (ti, &t) in grid.iter().enumerate() {
        for (ai, &alpha) in cfg.alphas.iter().enumerate() {
            out.push_str(&sig12(t));
            out.push(',');
            out.push_str(&sig12(alpha.re));
            if alpha.im != 0.0 {
                let _ = std::fmt::Write::write_fmt(
                    &mut out,
                    format_args!("{}{}i", if alpha.im >= 0.0 { "+" } else { "" }, alpha.im),
                );
            }
            out.push(',');
            out.push_str(&sig12(analytic[ti][ai]));
            if let Some(m) = &micro {
                out.push(',');
                out.push_str(&sig12(m[ti][ai]));
            }
            if let Some(l) = &lindblad_cols {
                out.push(',');
                out.push_str(&sig12(l[ti][ai]));
            }
            out.push('\n');
        }
    }
    if let Some(m) = &micro {
        let dev = max_dev(&analytic, m);
        let _ = std::fmt::Write::write_fmt(
            &mut out,
            format_args!("# max|F_analytic - F_micro| = {}\n", sig12(dev)),
        );
    }
    if let Some(l) = &lindblad_cols {
        let dev = max_dev(&analytic, l);
        let _ = std::fmt::Write::write_fmt(
            &mut out,
            format_args!("# max|F_analytic - F_lindblad| = {}\n", sig12(dev)),
        );
    }
    Ok(out)
}

fn transpose(cols: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let rows = cols[0].len();
    (0..rows)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect()
}

fn max_dev(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// `oracle-compare`: mixing coefficients, decoherence factor and fidelity
/// from every requested route, with a threshold summary. The returned flag
/// reports whether every agreement threshold held; the table is emitted
/// either way.
pub fn oracle_compare(cfg: &RunConfig) -> Result<(String, bool), CmdError> {
    let dc = cfg.physical.drift_constants().map_err(lift)?;
    let grid = time_grid(cfg);
    let bath = build_bath(&cfg.physical, cfg.bath_n, cfg.bath_w, cfg.t_max).map_err(lift)?;
    let with_lindblad = cfg.oracles.contains(&Oracle::Lindblad);

    let lind: Option<Vec<Vec<f64>>> = if with_lindblad {
        let columns: Result<Vec<Vec<f64>>, CmdError> = cfg
            .alphas
            .par_iter()
            .map(|&alpha| lindblad_fidelity_column(cfg, alpha, &grid))
            .collect();
        Some(transpose(columns?))
    } else {
        None
    };

    let mut worst_u = 0.0f64;
    let mut worst_z = 0.0f64;
    let mut worst_f_micro = 0.0f64;
    let mut worst_f_lind = 0.0f64;

    let mut out = header(cfg, "oracle-compare");
    out.push_str("t,alpha,abs_u11_analytic,abs_u11_micro,abs_u12_analytic,abs_u12_micro,abs_Z_analytic,abs_z_micro,F_analytic,F_micro");
    if lind.is_some() {
        out.push_str(",F_lindblad");
    }
    out.push('\n');

    for (ti, &t) in grid.iter().enumerate() {
        let ana = mixing_coefficients(&dc, t);
        strict_check(cfg, &ana)?;
        let micro = bath.extract_mixing(t).map_err(lift)?;
        if t > 0.0 {
            for (m, a) in [(micro.u11, ana.u11), (micro.u12, ana.u12)] {
                // Relative deviation floored at 10% of the unit row scale;
                // coefficients passing through zero carry a fixed flat-band
                // offset that no discretization removes.
                worst_u = worst_u.max((m.norm() - a.norm()).abs() / a.norm().max(0.1));
            }
        }
        for (ai, &alpha) in cfg.alphas.iter().enumerate() {
            let z_ana = decoherence_factor(&ana, alpha);
            let z_micro = bath.cat_coherence(alpha, t).map_err(lift)?;
            if t > 0.0 && z_ana.norm() > 1e-3 {
                worst_z = worst_z.max((z_ana - z_micro).norm() / z_ana.norm());
            }
            let f_ana = fidelity_scs(&ana, alpha).map_err(lift)?;
            let f_micro = bath.micro_fidelity(alpha, t).map_err(lift)?;
            worst_f_micro = worst_f_micro.max((f_ana - f_micro).abs());
            out.push_str(&sig12(t));
            out.push(',');
            out.push_str(&sig12(alpha.re));
            for v in [
                ana.u11.norm(),
                micro.u11.norm(),
                ana.u12.norm(),
                micro.u12.norm(),
                z_ana.norm(),
                z_micro.norm(),
                f_ana,
                f_micro,
            ] {
                out.push(',');
                out.push_str(&sig12(v));
            }
            if let Some(l) = &lind {
                worst_f_lind = worst_f_lind.max((f_ana - l[ti][ai]).abs());
                out.push(',');
                out.push_str(&sig12(l[ti][ai]));
            }
            out.push('\n');
        }
    }

    let mut pass = true;
    let mut summary = String::new();
    let mut gate = |name: &str, value: f64, limit: f64| {
        let ok = value <= limit;
        pass &= ok;
        let _ = std::fmt::Write::write_fmt(
            &mut summary,
            format_args!(
                "# {name} = {} (limit {limit}) {}\n",
                sig12(value),
                if ok { "PASS" } else { "FAIL" }
            ),
        );
    };
    gate("max_rel_dev_u", worst_u, 0.02);
    gate("max_rel_dev_Z", worst_z, 0.02);
    gate("max_abs_dev_F_micro", worst_f_micro, 0.02);
    if lind.is_some() {
        gate("max_abs_dev_F_lindblad", worst_f_lind, 5e-3);
    }
    out.push_str(&summary);
    if pass {
        out.push_str("# RESULT: PASS\n");
    } else {
        out.push_str("# RESULT: FAIL (WW-regime deviation)\n");
    }
    Ok((out, pass))
}

/// `dump-mixing`: real and imaginary parts of all four coefficients on the
/// time grid.
pub fn dump_mixing(cfg: &RunConfig) -> Result<String, CmdError> {
    let dc = cfg.physical.drift_constants().map_err(lift)?;
    let mut out = header(cfg, "dump-mixing");
    out.push_str(
        "t,Re_u11,Im_u11,Re_u12,Im_u12,Re_u21,Im_u21,Re_u22,Im_u22,leak_row1\n",
    );
    for &t in &time_grid(cfg) {
        let mix = mixing_coefficients(&dc, t);
        strict_check(cfg, &mix)?;
        out.push_str(&sig12(t));
        for v in [
            mix.u11.re,
            mix.u11.im,
            mix.u12.re,
            mix.u12.im,
            mix.u21.re,
            mix.u21.im,
            mix.u22.re,
            mix.u22.im,
            bicavity::propagator::bath_leak_row1(&mix),
        ] {
            out.push(',');
            out.push_str(&sig12(v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// `dump-q`: Husimi field of the evolved SCS (amplitude `q_alpha`, time
/// `q_time`) on a square grid, row-major with the imaginary axis outer.
pub fn dump_q(cfg: &RunConfig) -> Result<String, CmdError> {
    let dc = cfg.physical.drift_constants().map_err(lift)?;
    let mix = mixing_coefficients(&dc, cfg.q_time);
    strict_check(cfg, &mix)?;
    let bd = evolve_branched(&mix, &BranchedState::cat(cfg.q_alpha), 0.0).map_err(lift)?;
    let d_noise =
        bicavity::propagator::thermal_noise(&mix, cfg.physical.nbar).map_err(lift)?;
    let grid = GridSpec::new(C64::new(0.0, 0.0), cfg.grid_extent, cfg.grid_n);
    let field = husimi_q(&bd, &grid, d_noise).map_err(lift)?;
    if cfg.strict && field.min() < 0.0 {
        return Err(CmdError::Numerical("negative Husimi value".into()));
    }
    let mut out = header(cfg, "dump-q");
    out.push_str("re_xi,im_xi,q\n");
    for iy in 0..grid.n {
        for ix in 0..grid.n {
            let xi = grid.point(ix, iy);
            out.push_str(&sig12(xi.re));
            out.push(',');
            out.push_str(&sig12(xi.im));
            out.push(',');
            out.push_str(&sig12(field.value(ix, iy)));
            out.push('\n');
        }
    }
    let _ = std::fmt::Write::write_fmt(
        &mut out,
        format_args!("# grid_integral = {}\n", sig12(field.integral())),
    );
    Ok(out)
}
