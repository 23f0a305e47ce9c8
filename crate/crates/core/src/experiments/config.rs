use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    TimeSweep,
    WSweep,
    Frontier,
    Verify,
    /// Single point, first entry of each list.
    Protect,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::TimeSweep => "time-sweep",
            Mode::WSweep => "w-sweep",
            Mode::Frontier => "frontier",
            Mode::Verify => "verify",
            Mode::Protect => "protect",
        }
    }
}

/// A real number given either as a literal or as text such as `"0.4225pi"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Number(f64),
    Text(String),
}

impl Real {
    pub fn value(&self) -> Result<f64> {
        match self {
            Real::Number(x) => Ok(*x),
            Real::Text(s) => parse_real(s),
        }
    }
}

/// Parses `1.5`, `pi`, `0.4225pi`, `-pi`, `2*pi`, `pi/2`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || Error::Config(format!("cannot parse {s:?} as a number"));
    let value = if let Some(pos) = t.find("pi") {
        let (coef, rest) = (t[..pos].trim_end_matches('*').trim(), t[pos + 2..].trim());
        let coef = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let div = match rest.strip_prefix('/') {
            Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
            None if rest.is_empty() => 1.0,
            None => return Err(bad()),
        };
        coef * PI / div
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// Comma-separated list of [`parse_real`] values.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(parse_real)
        .collect()
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn named_thetas() -> Vec<f64> {
    vec![PI / 3.0, PI / 2.0, PI]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub mode: Mode,
    pub gamma: f64,
    pub t_list: Vec<f64>,
    pub w_list: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub phi: f64,
    pub target_fidelity: f64,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn defaults(mode: Mode) -> Self {
        let base = Self {
            mode,
            gamma: 0.5,
            t_list: linspace(0.1, 5.0, 20),
            w_list: vec![0.1],
            theta_grid: named_thetas(),
            phi: PI / 2.0,
            target_fidelity: 0.95,
            output: None,
        };
        match mode {
            Mode::TimeSweep | Mode::Verify => base,
            Mode::WSweep => Self {
                t_list: vec![1.0],
                w_list: (1..=20).map(|i| i as f64 / 21.0).collect(),
                ..base
            },
            Mode::Frontier => Self {
                t_list: vec![1.0],
                w_list: vec![],
                theta_grid: linspace(0.4225 * PI, 0.99 * PI, 24),
                ..base
            },
            Mode::Protect => Self {
                t_list: vec![5.0],
                theta_grid: vec![PI / 2.0],
                ..base
            },
        }
    }

    /// Mode defaults, then the file, then `overrides`.
    pub fn resolve(mode: Mode, file: Option<&ConfigFile>, overrides: &ConfigFile) -> Result<Self> {
        let mut cfg = Self::defaults(mode);
        for layer in file.into_iter().chain(std::iter::once(overrides)) {
            if let Some(m) = layer.mode {
                if m != mode {
                    return Err(Error::Config(format!(
                        "config mode {} does not match command {}",
                        m.name(),
                        mode.name()
                    )));
                }
            }
            cfg.apply(layer)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, layer: &ConfigFile) -> Result<()> {
        let list = |v: &Vec<Real>| v.iter().map(Real::value).collect::<Result<Vec<_>>>();
        if let Some(g) = &layer.gamma {
            self.gamma = g.value()?;
        }
        if let Some(v) = &layer.t_list {
            self.t_list = list(v)?;
        }
        if let Some(v) = &layer.w_list {
            self.w_list = list(v)?;
        }
        if let Some(v) = &layer.theta_grid {
            self.theta_grid = list(v)?;
        }
        if let Some(p) = &layer.phi {
            self.phi = p.value()?;
        }
        if let Some(f) = &layer.target_fidelity {
            self.target_fidelity = f.value()?;
        }
        if let Some(o) = &layer.output {
            self.output = Some(o.clone());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |msg: String| Err(Error::Config(msg));
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return cfg_err(format!("gamma must be finite and >= 0, got {}", self.gamma));
        }
        if let Some(t) = self.t_list.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return cfg_err(format!("t must be finite and >= 0, got {t}"));
        }
        if let Some(w) = self.w_list.iter().find(|w| !(0.0..1.0).contains(*w)) {
            return cfg_err(format!("w must lie in [0, 1), got {w}"));
        }
        if let Some(th) = self.theta_grid.iter().find(|th| !(0.0..=PI).contains(*th)) {
            return cfg_err(format!("theta must lie in [0, pi], got {th}"));
        }
        if !self.phi.is_finite() {
            return cfg_err("phi must be finite".into());
        }
        if !(self.target_fidelity > 0.0 && self.target_fidelity <= 1.0) {
            return cfg_err(format!(
                "target fidelity must lie in (0, 1], got {}",
                self.target_fidelity
            ));
        }
        if self.theta_grid.is_empty() || self.t_list.is_empty() {
            return cfg_err("theta and t grids must be non-empty".into());
        }
        match self.mode {
            Mode::TimeSweep | Mode::WSweep | Mode::Protect if self.w_list.is_empty() => {
                cfg_err("w grid must be non-empty".into())
            }
            Mode::Frontier if self.t_list.len() != 1 => {
                cfg_err("frontier takes a single t value".into())
            }
            _ => Ok(()),
        }
    }
}

/// JSON config document; every field optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub mode: Option<Mode>,
    pub gamma: Option<Real>,
    pub t_list: Option<Vec<Real>>,
    pub w_list: Option<Vec<Real>>,
    pub theta_grid: Option<Vec<Real>>,
    pub phi: Option<Real>,
    pub target_fidelity: Option<Real>,
    pub output: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pi_forms() {
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert!((parse_real("0.4225pi").unwrap() - 0.4225 * PI).abs() < 1e-15);
        assert!((parse_real("pi/2").unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((parse_real("2*pi").unwrap() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(parse_real(" -PI ").unwrap(), -PI);
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert!(parse_real("pie").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real("inf").is_err());
        assert_eq!(parse_list("0.1, 0.2,pi").unwrap(), vec![0.1, 0.2, PI]);
    }

    #[test]
    fn default_grids() {
        let t = SweepConfig::defaults(Mode::TimeSweep);
        assert_eq!(t.t_list.len(), 20);
        assert_eq!(t.t_list[0], 0.1);
        assert!((t.t_list[19] - 5.0).abs() < 1e-15);
        let w = SweepConfig::defaults(Mode::WSweep);
        assert_eq!(w.w_list.len(), 20);
        assert!(w.w_list.iter().all(|w| *w > 0.0 && *w < 1.0));
        let f = SweepConfig::defaults(Mode::Frontier);
        assert_eq!(f.theta_grid.len(), 24);
        assert!((f.theta_grid[0] - 0.4225 * PI).abs() < 1e-15);
        for mode in [Mode::TimeSweep, Mode::WSweep, Mode::Frontier, Mode::Verify, Mode::Protect] {
            SweepConfig::defaults(mode).validate().unwrap();
        }
    }

    #[test]
    fn layering_and_validation() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"gamma": 0.7, "theta_grid": ["0.5pi", 1.0], "t_list": [2]}"#)
                .unwrap();
        let flags = ConfigFile {
            gamma: Some(Real::Number(0.9)),
            ..Default::default()
        };
        let cfg = SweepConfig::resolve(Mode::TimeSweep, Some(&file), &flags).unwrap();
        assert_eq!(cfg.gamma, 0.9);
        assert_eq!(cfg.theta_grid, vec![PI / 2.0, 1.0]);
        assert_eq!(cfg.t_list, vec![2.0]);

        let empty = ConfigFile {
            t_list: Some(vec![]),
            ..Default::default()
        };
        assert!(matches!(
            SweepConfig::resolve(Mode::TimeSweep, None, &empty),
            Err(Error::Config(_))
        ));
        let bad_w = ConfigFile {
            w_list: Some(vec![Real::Number(1.0)]),
            ..Default::default()
        };
        assert!(SweepConfig::resolve(Mode::WSweep, None, &bad_w).is_err());
        let wrong_mode = ConfigFile {
            mode: Some(Mode::Frontier),
            ..Default::default()
        };
        assert!(SweepConfig::resolve(Mode::WSweep, Some(&wrong_mode), &ConfigFile::default()).is_err());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"gama": 1}"#).is_err());
    }
}
