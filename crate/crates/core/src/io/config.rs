//! Flat `key = value` experiment configuration.
//!
//! Keys are the long CLI flag names without the leading dashes, so a config
//! file line `n-u = 200` and the flag `--n-u 200` are interchangeable.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chardata::{ProfileKind, PulseShape};
use crate::error::{Error, Result};
use crate::grid::RunParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Minkowski,
    Trapped,
    Charging,
    Scaling,
    Convergence,
    Decay,
    Siglint,
    Sweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Minkowski,
        ExperimentKind::Trapped,
        ExperimentKind::Charging,
        ExperimentKind::Scaling,
        ExperimentKind::Convergence,
        ExperimentKind::Decay,
        ExperimentKind::Siglint,
        ExperimentKind::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Minkowski => "minkowski",
            ExperimentKind::Trapped => "trapped",
            ExperimentKind::Charging => "charging",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Decay => "decay",
            ExperimentKind::Siglint => "siglint",
            ExperimentKind::Sweep => "sweep",
        }
    }

    /// Whether the preset calibrates the pulse against the lower bounds by default.
    pub fn calibrates(self) -> bool {
        !matches!(self, ExperimentKind::Minkowski | ExperimentKind::Siglint)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub params: RunParams,
    pub out_dir: PathBuf,
    pub plot: bool,
    /// Rescale the pulse so both lower bounds hold before running.
    pub calibrate: bool,
    /// Scaling factor δ of the covariance experiment.
    pub delta: Option<f64>,
    /// Values of `a` visited by the sweep preset.
    pub sweep_a: Vec<f64>,
    /// Outgoing coordinate at which decay tails are sampled.
    pub v_star: f64,
    /// Number of resolution doublings in the convergence preset (at least 2).
    pub refinements: usize,
}

/// Keys accepted by [`ExperimentConfig::set`].
pub const CONFIG_KEYS: [&str; 20] = [
    "kind",
    "a",
    "coupling",
    "u-inf-factor",
    "n-u",
    "n-v",
    "n",
    "delta",
    "delta-scale",
    "pulse-amp",
    "pulse-phase-rate",
    "pulse-v0",
    "pulse-v1",
    "pulse-profile",
    "calibrate",
    "out-dir",
    "plot",
    "sweep-a",
    "v-star",
    "refinements",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got {v:?}"))),
    }
}

pub fn parse_profile(v: &str) -> Result<ProfileKind> {
    match v {
        "smooth-bump" | "smoothBump" => Ok(ProfileKind::SmoothBump),
        "sine-squared" | "sineSquared" => Ok(ProfileKind::SineSquared),
        _ => Err(Error::Config(format!("pulse-profile: unknown profile {v:?}"))),
    }
}

impl ExperimentConfig {
    /// Preset defaults for `kind`: a = 40, K = 4, 200 × 200 cells (100 × 100 as the coarsest
    /// convergence level), smooth bump on (0.1, 0.9).
    pub fn new(kind: ExperimentKind) -> Self {
        let n = if kind == ExperimentKind::Convergence { 100 } else { 200 };
        let pulse = match kind {
            ExperimentKind::Minkowski => PulseShape::vacuum(),
            _ => PulseShape { profile_kind: ProfileKind::SmoothBump, ..PulseShape::default() },
        };
        ExperimentConfig {
            kind,
            params: RunParams { pulse, n_u: n, n_v: n, ..RunParams::default() },
            out_dir: PathBuf::from("out"),
            plot: false,
            calibrate: kind.calibrates(),
            delta: (kind == ExperimentKind::Scaling).then_some(0.5),
            sweep_a: vec![40.0, 80.0, 160.0],
            v_star: 0.25,
            refinements: 2,
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let p = &mut self.params;
        match key {
            "kind" => {
                let k: ExperimentKind = v.parse()?;
                if k != self.kind {
                    let keep = (self.out_dir.clone(), self.plot);
                    *self = ExperimentConfig::new(k);
                    (self.out_dir, self.plot) = keep;
                }
            }
            "a" => p.a = num(key, v)?,
            "coupling" => p.coupling = num(key, v)?,
            "u-inf-factor" => p.u_inf_factor = num(key, v)?,
            "n-u" => p.n_u = num(key, v)?,
            "n-v" => p.n_v = num(key, v)?,
            "n" => {
                p.n_u = num(key, v)?;
                p.n_v = p.n_u;
            }
            "delta" => self.delta = Some(num(key, v)?),
            "delta-scale" => p.delta_scale = num(key, v)?,
            "pulse-amp" => p.pulse.amp = num(key, v)?,
            "pulse-phase-rate" => p.pulse.phase_rate = num(key, v)?,
            "pulse-v0" => p.pulse.support.0 = num(key, v)?,
            "pulse-v1" => p.pulse.support.1 = num(key, v)?,
            "pulse-profile" => p.pulse.profile_kind = parse_profile(v)?,
            "calibrate" => self.calibrate = boolean(key, v)?,
            "out-dir" => self.out_dir = PathBuf::from(v),
            "plot" => self.plot = boolean(key, v)?,
            "sweep-a" => {
                self.sweep_a = v.split(',').map(|s| num::<f64>(key, s.trim())).collect::<Result<Vec<_>>>()?;
            }
            "v-star" => self.v_star = num(key, v)?,
            "refinements" => self.refinements = num(key, v)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses a config file. `kind` may appear anywhere; it is applied first.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", k + 1)))?;
            pairs.push((k + 1, key.trim().to_string(), value.trim().to_string()));
        }
        let kind = match pairs.iter().find(|p| p.1 == "kind") {
            Some(p) => p.2.parse()?,
            None => return Err(Error::Config("missing key \"kind\"".into())),
        };
        let mut cfg = ExperimentConfig::new(kind);
        for (line, key, value) in pairs.iter().filter(|p| p.1 != "kind") {
            cfg.set(key, value).map_err(|e| Error::Config(format!("line {line}: {e}")))?;
        }
        Ok(cfg)
    }

    /// Renders the configuration in the file format read by [`ExperimentConfig::parse`].
    pub fn to_kv(&self) -> String {
        let p = &self.params;
        let profile = match p.pulse.profile_kind {
            ProfileKind::SmoothBump => "smooth-bump",
            ProfileKind::SineSquared => "sine-squared",
        };
        let mut s = format!(
            "kind = {}\na = {}\ncoupling = {}\nu-inf-factor = {}\nn-u = {}\nn-v = {}\ndelta-scale = {}\n\
             pulse-amp = {}\npulse-phase-rate = {}\npulse-v0 = {}\npulse-v1 = {}\npulse-profile = {}\n\
             calibrate = {}\nout-dir = {}\nplot = {}\nsweep-a = {}\nv-star = {}\nrefinements = {}\n",
            self.kind,
            p.a,
            p.coupling,
            p.u_inf_factor,
            p.n_u,
            p.n_v,
            p.delta_scale,
            p.pulse.amp,
            p.pulse.phase_rate,
            p.pulse.support.0,
            p.pulse.support.1,
            profile,
            self.calibrate,
            self.out_dir.display(),
            self.plot,
            self.sweep_a.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","),
            self.v_star,
            self.refinements,
        );
        if let Some(d) = self.delta {
            s.push_str(&format!("delta = {d}\n"));
        }
        s
    }

    /// Parameter and kind-specific completeness checks.
    pub fn validate(&self) -> Result<()> {
        if self.kind != ExperimentKind::Siglint {
            self.params.validate()?;
        }
        match self.kind {
            ExperimentKind::Scaling => match self.delta {
                None => return Err(Error::Config("scaling requires delta".into())),
                Some(d) if !(d > 0.0 && d.is_finite()) => {
                    return Err(Error::Config(format!("delta must be positive, got {d}")))
                }
                _ => {}
            },
            ExperimentKind::Sweep => {
                if self.sweep_a.len() < 2 {
                    return Err(Error::Config("sweep requires at least two values in sweep-a".into()));
                }
                if self.sweep_a.iter().any(|a| !(*a > 1.0)) {
                    return Err(Error::Config("every sweep-a value must exceed 1".into()));
                }
            }
            ExperimentKind::Convergence if self.refinements < 2 => {
                return Err(Error::Config("convergence requires refinements >= 2".into()));
            }
            ExperimentKind::Decay if !(0.0..=1.0).contains(&self.v_star) => {
                return Err(Error::Config("v-star must lie in [0, 1]".into()));
            }
            _ => {}
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(Error::Config("out-dir must not be empty".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let cfg = ExperimentConfig::parse(
            "# trapped run\nn-u = 50\nkind = trapped\na=80\npulse-profile = sine-squared # window\nplot = yes\n",
        )
        .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Trapped);
        assert_eq!(cfg.params.n_u, 50);
        assert_eq!(cfg.params.n_v, 200);
        assert_eq!(cfg.params.a, 80.0);
        assert_eq!(cfg.params.pulse.profile_kind, ProfileKind::SineSquared);
        assert!(cfg.plot && cfg.calibrate);
    }

    #[test]
    fn round_trip_through_text() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Sweep);
        cfg.set("sweep-a", "40, 80").unwrap();
        cfg.set("n", "64").unwrap();
        cfg.set("delta", "0.25").unwrap();
        let back = ExperimentConfig::parse(&cfg.to_kv()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn errors_name_the_problem() {
        let e = ExperimentConfig::parse("kind = trapped\nbogus = 1\n").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("bogus"), "{e}");
        let e = ExperimentConfig::parse("a = 3\n").unwrap_err().to_string();
        assert!(e.contains("kind"), "{e}");
        let e = ExperimentConfig::parse("kind = nope\n").unwrap_err().to_string();
        assert!(e.contains("nope"), "{e}");
        let e = ExperimentConfig::parse("kind = minkowski\na\n").unwrap_err().to_string();
        assert!(e.contains("key = value"), "{e}");
    }

    #[test]
    fn kind_specific_validation() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Scaling);
        assert!(cfg.validate().is_ok());
        cfg.delta = None;
        assert!(cfg.validate().unwrap_err().to_string().contains("requires delta"));
        let mut cfg = ExperimentConfig::new(ExperimentKind::Sweep);
        cfg.sweep_a = vec![40.0];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new(ExperimentKind::Minkowski);
        cfg.set("a", "0.5").unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("a must exceed 1"));
    }

    #[test]
    fn every_key_is_accepted() {
        let values = [
            "decay",
            "40",
            "0.01",
            "4",
            "10",
            "10",
            "10",
            "0.5",
            "1",
            "1",
            "0",
            "0.1",
            "0.9",
            "smooth-bump",
            "true",
            "x",
            "false",
            "40,80",
            "0.3",
            "2",
        ];
        for (k, v) in CONFIG_KEYS.iter().zip(values) {
            let mut cfg = ExperimentConfig::new(ExperimentKind::Decay);
            cfg.set(k, v).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }
}
