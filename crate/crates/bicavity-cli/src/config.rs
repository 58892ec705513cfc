//! Run configuration: defaults, flat key=value config files with unit
//! suffixes, and the resolved-config echo emitted at the top of every output.

use num_complex::Complex64 as C64;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use bicavity::model::{Branch, Frame, PhysicalConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    Analytic,
    Micro,
    Lindblad,
}

/// Everything a run needs; flags override file values, file values override
/// these defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub physical: PhysicalConfig,
    pub alphas: Vec<C64>,
    pub t_max: f64,
    pub t_steps: usize,
    pub oracles: Vec<Oracle>,
    pub bath_n: usize,
    pub bath_w: f64,
    pub fock_dim: Option<usize>,
    pub seed: u64,
    pub strict: bool,
    pub q_alpha: C64,
    pub q_time: f64,
    pub grid_extent: f64,
    pub grid_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            physical: PhysicalConfig::default(),
            alphas: [0.5, 1.0, 1.5, 2.0].iter().map(|&a| C64::new(a, 0.0)).collect(),
            t_max: 3e-3,
            t_steps: 301,
            oracles: vec![Oracle::Analytic],
            bath_n: 800,
            bath_w: TAU * 1e5,
            fock_dim: None,
            seed: 0,
            strict: false,
            q_alpha: C64::new(2.0, 0.0),
            q_time: 0.0,
            grid_extent: 6.0,
            grid_n: 81,
        }
    }
}

/// Seconds from `3ms`, `120us`, `1.5s`, or a bare number of seconds.
pub fn parse_time(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, scale) = if let Some(x) = s.strip_suffix("ns") {
        (x, 1e-9)
    } else if let Some(x) = s.strip_suffix("us") {
        (x, 1e-6)
    } else if let Some(x) = s.strip_suffix("ms") {
        (x, 1e-3)
    } else if let Some(x) = s.strip_suffix('s') {
        (x, 1.0)
    } else {
        (s, 1.0)
    };
    num.trim()
        .parse::<f64>()
        .map(|v| v * scale)
        .map_err(|_| format!("cannot parse time '{s}'"))
}

/// Angular frequency (rad/s) from `100kHz`, `51.1GHz`, or a bare number
/// already in rad/s.
pub fn parse_freq(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, scale) = if let Some(x) = s.strip_suffix("GHz") {
        (x, TAU * 1e9)
    } else if let Some(x) = s.strip_suffix("MHz") {
        (x, TAU * 1e6)
    } else if let Some(x) = s.strip_suffix("kHz") {
        (x, TAU * 1e3)
    } else if let Some(x) = s.strip_suffix("Hz") {
        (x, TAU)
    } else {
        (s, 1.0)
    };
    num.trim()
        .parse::<f64>()
        .map(|v| v * scale)
        .map_err(|_| format!("cannot parse frequency '{s}'"))
}

/// Complex amplitude: `1.5`, `1.5+0.5i`, `-2i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let s = s.trim();
    if let Some(im) = s.strip_suffix('i') {
        // Split a trailing imaginary part from an optional real part.
        let bytes = im.as_bytes();
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-')
                && bytes[k - 1] != b'e'
                && bytes[k - 1] != b'E'
            {
                let re: f64 = im[..k].parse().map_err(|_| format!("cannot parse '{s}'"))?;
                let imag: f64 = match &im[k..] {
                    "+" => 1.0,
                    "-" => -1.0,
                    rest => rest.parse().map_err(|_| format!("cannot parse '{s}'"))?,
                };
                return Ok(C64::new(re, imag));
            }
        }
        let imag: f64 = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            rest => rest.parse().map_err(|_| format!("cannot parse '{s}'"))?,
        };
        return Ok(C64::new(0.0, imag));
    }
    s.parse::<f64>()
        .map(|re| C64::new(re, 0.0))
        .map_err(|_| format!("cannot parse amplitude '{s}'"))
}

pub fn parse_alphas(s: &str) -> Result<Vec<C64>, String> {
    let list: Result<Vec<C64>, String> = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(parse_complex)
        .collect();
    list
}

pub fn parse_oracles(s: &str) -> Result<Vec<Oracle>, String> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| match x.trim() {
            "analytic" => Ok(Oracle::Analytic),
            "micro" => Ok(Oracle::Micro),
            "lindblad" => Ok(Oracle::Lindblad),
            other => Err(format!("unknown oracle '{other}' (analytic, micro, lindblad)")),
        })
        .collect()
}

pub fn parse_frame(s: &str) -> Result<Frame, String> {
    match s.trim() {
        "rotating" => Ok(Frame::Rotating),
        "lab" => Ok(Frame::Lab),
        other => Err(format!("unknown frame '{other}' (rotating, lab)")),
    }
}

pub fn parse_branch(s: &str) -> Result<Branch, String> {
    match s.trim() {
        "none" => Ok(Branch::None),
        "ground" => Ok(Branch::Ground),
        "excited" => Ok(Branch::Excited),
        other => Err(format!("unknown branch '{other}' (none, ground, excited)")),
    }
}

impl RunConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let p = &mut self.physical;
        match key {
            "T1" | "t1" => p.gamma11 = 1.0 / parse_time(value)?,
            "T2" | "t2" => p.gamma22 = 1.0 / parse_time(value)?,
            "gamma11" => p.gamma11 = value.parse().map_err(|_| bad(key, value))?,
            "gamma22" => p.gamma22 = value.parse().map_err(|_| bad(key, value))?,
            "kappa" => p.kappa = value.parse().map_err(|_| bad(key, value))?,
            "nbar" => p.nbar = value.parse().map_err(|_| bad(key, value))?,
            "frame" => p.frame = parse_frame(value)?,
            "branch" => p.branch = parse_branch(value)?,
            "g" => p.g = parse_freq(value)?,
            "delta1" => p.delta1 = parse_freq(value)?,
            "omega1" => p.omega1 = parse_freq(value)?,
            "omega2" => p.omega2 = parse_freq(value)?,
            "dshift1" => p.dshift1 = parse_freq(value)?,
            "dshift2" => p.dshift2 = parse_freq(value)?,
            "dshift12" => p.dshift12 = parse_freq(value)?,
            "alpha" => self.alphas = parse_alphas(value)?,
            "t_max" => self.t_max = parse_time(value)?,
            "t_steps" => self.t_steps = value.parse().map_err(|_| bad(key, value))?,
            "oracles" => self.oracles = parse_oracles(value)?,
            "bath_n" => self.bath_n = value.parse().map_err(|_| bad(key, value))?,
            "bath_w" => self.bath_w = parse_freq(value)?,
            "fock_dim" => self.fock_dim = Some(value.parse().map_err(|_| bad(key, value))?),
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "q_alpha" => self.q_alpha = parse_complex(value)?,
            "q_time" => self.q_time = parse_time(value)?,
            "grid_extent" => self.grid_extent = value.parse().map_err(|_| bad(key, value))?,
            "grid_n" => self.grid_n = value.parse().map_err(|_| bad(key, value))?,
            other => return Err(format!("unknown configuration key '{other}'")),
        }
        Ok(())
    }

    /// Parse a flat config file: `key = value` lines, `#` comments.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {}", lineno + 1, e))?;
        }
        Ok(())
    }

    /// Validate the run-level invariants; the physical ones live in
    /// [`PhysicalConfig::validate`].
    pub fn validate(&self) -> Result<(), String> {
        if self.alphas.is_empty() {
            return Err("alpha: at least one amplitude is required".into());
        }
        if self.t_steps < 2 {
            return Err(format!("t_steps: need >= 2, got {}", self.t_steps));
        }
        if self.grid_n < 2 {
            return Err(format!("grid_n: need >= 2, got {}", self.grid_n));
        }
        let violations = self.physical.validate();
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(msgs.join("; "));
        }
        Ok(())
    }

    fn fmt_c(z: C64) -> String {
        if z.im == 0.0 {
            format!("{}", z.re)
        } else if z.im >= 0.0 {
            format!("{}+{}i", z.re, z.im)
        } else {
            format!("{}{}i", z.re, z.im)
        }
    }

    /// Resolved configuration echo, one `# key = value` line per field in a
    /// fixed order, all values in base units.
    pub fn echo(&self) -> String {
        let p = &self.physical;
        let alphas: Vec<String> = self.alphas.iter().map(|&a| Self::fmt_c(a)).collect();
        let oracles: Vec<&str> = self
            .oracles
            .iter()
            .map(|o| match o {
                Oracle::Analytic => "analytic",
                Oracle::Micro => "micro",
                Oracle::Lindblad => "lindblad",
            })
            .collect();
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "# {k} = {v}");
        };
        kv("alpha", alphas.join(","));
        kv("bath_n", self.bath_n.to_string());
        kv("bath_w", format!("{}", self.bath_w));
        kv(
            "branch",
            match p.branch {
                Branch::None => "none",
                Branch::Ground => "ground",
                Branch::Excited => "excited",
            }
            .into(),
        );
        kv("delta1", format!("{}", p.delta1));
        kv("dshift1", format!("{}", p.dshift1));
        kv("dshift12", format!("{}", p.dshift12));
        kv("dshift2", format!("{}", p.dshift2));
        kv(
            "fock_dim",
            self.fock_dim.map_or("auto".into(), |d| d.to_string()),
        );
        kv(
            "frame",
            match p.frame {
                Frame::Rotating => "rotating",
                Frame::Lab => "lab",
            }
            .into(),
        );
        kv("g", format!("{}", p.g));
        kv("gamma11", format!("{}", p.gamma11));
        kv("gamma22", format!("{}", p.gamma22));
        kv("grid_extent", format!("{}", self.grid_extent));
        kv("grid_n", self.grid_n.to_string());
        kv("kappa", format!("{}", p.kappa));
        kv("nbar", format!("{}", p.nbar));
        kv("omega1", format!("{}", p.omega1));
        kv("omega2", format!("{}", p.omega2));
        kv("oracles", oracles.join(","));
        kv("q_alpha", Self::fmt_c(self.q_alpha));
        kv("q_time", format!("{}", self.q_time));
        kv("seed", self.seed.to_string());
        kv("strict", self.strict.to_string());
        kv("t_max", format!("{}", self.t_max));
        kv("t_steps", self.t_steps.to_string());
        out
    }
}

fn bad(key: &str, value: &str) -> String {
    format!("cannot parse {key} = '{value}'")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_suffixes() {
        assert_eq!(parse_time("1ms").unwrap(), 1e-3);
        assert!((parse_time("2.5us").unwrap() - 2.5e-6).abs() < 1e-20);
        assert!((parse_time("0.9ms").unwrap() - 0.9e-3).abs() < 1e-18);
        assert_eq!(parse_time("3e-3").unwrap(), 3e-3);
        assert!((parse_freq("100kHz").unwrap() - TAU * 1e5).abs() < 1e-6);
        assert_eq!(parse_freq("6.28e5").unwrap(), 6.28e5);
        assert!(parse_time("abc").is_err());
    }

    #[test]
    fn complex_amplitudes() {
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert_eq!(parse_complex("1.5+0.5i").unwrap(), C64::new(1.5, 0.5));
        assert_eq!(parse_complex("-2i").unwrap(), C64::new(0.0, -2.0));
        assert_eq!(parse_complex("1e-2-3e-1i").unwrap(), C64::new(0.01, -0.3));
        assert_eq!(
            parse_alphas("0.5,1,1.5,2").unwrap(),
            vec![
                C64::new(0.5, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.5, 0.0),
                C64::new(2.0, 0.0)
            ]
        );
    }

    #[test]
    fn file_assignments() {
        let mut cfg = RunConfig::default();
        cfg.apply_file(
            "# reference run\nT1 = 1ms\nT2 = 0.9ms\nkappa = 1\nalpha = 1,2\nt_steps = 51\nbath_w = 100kHz\n",
        )
        .unwrap();
        assert!((cfg.physical.gamma11 - 1000.0).abs() < 1e-9);
        assert!((cfg.physical.gamma22 - 1111.111111).abs() < 1e-3);
        assert_eq!(cfg.physical.kappa, 1.0);
        assert_eq!(cfg.alphas.len(), 2);
        assert_eq!(cfg.t_steps, 51);
        assert!((cfg.bath_w - TAU * 1e5).abs() < 1e-6);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn validation_names_fields() {
        let mut cfg = RunConfig::default();
        cfg.alphas.clear();
        let err = cfg.validate().unwrap_err();
        assert!(err.contains("alpha"));

        let mut cfg = RunConfig::default();
        cfg.physical.kappa = 1.2;
        assert!(cfg.validate().unwrap_err().contains("kappa"));
    }

    #[test]
    fn echo_is_deterministic() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.echo(), cfg.echo());
        assert!(cfg.echo().contains("# gamma11 = 1000\n"));
    }
}
