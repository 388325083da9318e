//! `summary.json`: measurements by key plus the preset assertions.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::convergence::ConvergenceReport;
use crate::chardata::{LowerBoundReport, PulseShape};
use crate::diagnostics::{sphere_diag, DecayFit, SphereDiag};
use crate::error::{Error, Result};
use crate::evolve::Solution;
use crate::rescale::CovarianceReport;

pub const SUMMARY_SCHEMA: &str = "emcsf-summary v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Assertion {
    /// Stable identifier, e.g. `charging.lowerBound`.
    pub name: String,
    pub description: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub u: f64,
    pub v: f64,
}

/// Trapped spheres of a run. `boundary` holds, per cone that has any, the smallest
/// trapped v.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrappedLocus {
    pub trapped_points: usize,
    pub initial_outgoing_trapped: usize,
    pub initial_incoming_trapped: usize,
    pub boundary: Vec<LocusPoint>,
}

impl TrappedLocus {
    pub fn of(sol: &Solution) -> Self {
        let a = sol.params().a;
        let mut boundary = Vec::new();
        let mut total = 0;
        for c in &sol.cones {
            let flags: Vec<bool> = c.points.iter().map(|p| sphere_diag(p, a).trapped).collect();
            total += flags.iter().filter(|f| **f).count();
            if let Some(j) = flags.iter().position(|f| *f) {
                boundary.push(LocusPoint { u: c.u, v: c.points[j].v });
            }
        }
        let first = &sol.cones[0];
        TrappedLocus {
            trapped_points: total,
            initial_outgoing_trapped: first.points.iter().filter(|p| sphere_diag(p, a).trapped).count(),
            initial_incoming_trapped: sol.cones.iter().filter(|c| sphere_diag(&c.points[0], a).trapped).count(),
            boundary,
        }
    }
}

/// Observables of one run, as reported per run in the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub a: f64,
    pub n_u: usize,
    pub n_v: usize,
    pub pulse: PulseShape,
    pub lower_bounds: LowerBoundReport,
    pub trapped_locus: TrappedLocus,
    /// `Q(u∞, 1)`.
    pub q_initial: f64,
    /// `m(u∞, 1)`.
    pub m_initial: f64,
    /// Diagnostics at `(−a/4, 1)`.
    pub final_sphere: SphereDiag,
    pub wall_clock_s: f64,
    pub warnings: Vec<String>,
}

impl RunRecord {
    pub fn of(sol: &Solution) -> Self {
        let p = sol.params();
        let init = sol.cones[0].points.last().expect("non-empty cone");
        let d0 = sphere_diag(init, p.a);
        RunRecord {
            a: p.a,
            n_u: p.n_u,
            n_v: p.n_v,
            pulse: p.pulse,
            lower_bounds: sol.meta.lower_bounds,
            trapped_locus: TrappedLocus::of(sol),
            q_initial: d0.q,
            m_initial: d0.m,
            final_sphere: sphere_diag(sol.final_cone().points.last().expect("non-empty cone"), p.a),
            wall_clock_s: sol.meta.wall_clock_s,
            warnings: sol.meta.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub schema: String,
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    pub fits: Vec<DecayFit>,
    pub convergence: Option<ConvergenceReport>,
    pub covariance: Option<CovarianceReport>,
    pub siglint: Option<serde_json::Value>,
    /// Every criterion measurement, keyed `<kind>.<quantity>`.
    pub measurements: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    pub wall_clock_s: f64,
}

impl Summary {
    pub fn new(config: &ExperimentConfig) -> Self {
        Summary {
            schema: SUMMARY_SCHEMA.to_string(),
            kind: config.kind,
            config: config.clone(),
            runs: Vec::new(),
            fits: Vec::new(),
            convergence: None,
            covariance: None,
            siglint: None,
            measurements: BTreeMap::new(),
            assertions: Vec::new(),
            wall_clock_s: 0.0,
        }
    }

    pub fn measure(&mut self, key: impl Into<String>, value: f64) {
        self.measurements.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.measurements.get(key).copied()
    }

    /// Records the measurement under `name` and an assertion on it.
    pub fn assert(&mut self, name: &str, description: &str, value: f64, bound: String, pass: bool) {
        self.measure(name, value);
        self.assertions.push(Assertion {
            name: name.to_string(),
            description: description.to_string(),
            value,
            bound,
            pass,
        });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.pass).collect()
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let s: Summary = serde_json::from_str(&fs::read_to_string(path)?)?;
        if s.schema != SUMMARY_SCHEMA {
            return Err(Error::Schema(format!("unsupported summary schema {:?}", s.schema)));
        }
        Ok(s)
    }
}
