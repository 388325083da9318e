//! The scaling map `x ↦ δx` and the covariance experiment comparing
//! evolve-then-rescale against rescale-then-evolve with coupling `𝔢/δ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{run_with, IntegratorSettings, Solution};
use crate::grid::{ConeData, PointState, RunParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScaleMap {
    pub delta: f64,
    pub coupling_prime: f64,
}

impl ScaleMap {
    pub fn new(delta: f64, coupling: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParams("delta must be positive".into()));
        }
        Ok(ScaleMap { delta, coupling_prime: coupling / delta })
    }
}

/// Image of a point state under the scaling by `δ`.
pub fn rescale_point(s: &PointState, delta: f64) -> PointState {
    let inv = 1.0 / delta;
    PointState {
        u: delta * s.u,
        v: delta * s.v,
        r: delta * s.r,
        ln_omega: s.ln_omega,
        trchi: inv * s.trchi,
        trchib: inv * s.trchib,
        omega: inv * s.omega,
        omegab: inv * s.omegab,
        rho_f: inv * s.rho_f,
        ub: s.ub,
        psi: s.psi,
        psi4: inv * s.psi4,
        psi3: inv * s.psi3,
    }
}

pub fn rescale_cone(c: &ConeData, delta: f64) -> ConeData {
    ConeData {
        u: delta * c.u,
        points: c.points.iter().map(|p| rescale_point(p, delta)).collect(),
        max_residual: c.max_residual,
    }
}

/// Per-field discrepancy between the two branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldDiscrepancy {
    pub field: String,
    pub max: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CovarianceReport {
    pub delta: f64,
    pub coupling: f64,
    pub coupling_prime: f64,
    pub fields: Vec<FieldDiscrepancy>,
}

impl CovarianceReport {
    pub fn get(&self, field: &str) -> Option<&FieldDiscrepancy> {
        self.fields.iter().find(|f| f.field == field)
    }

    pub fn max_overall(&self) -> f64 {
        self.fields.iter().fold(0.0, |m, f| m.max(f.max))
    }
}

/// Whether `δ` is an integer power of two (so every grid quantity scales exactly).
pub fn is_dyadic(delta: f64) -> bool {
    delta.is_normal() && delta > 0.0 && delta.to_bits() & ((1u64 << 52) - 1) == 0
}

/// Parameters of branch (B): the same problem posed on the scaled rectangle.
pub fn rescaled_params(params: &RunParams, delta: f64) -> Result<RunParams> {
    let map = ScaleMap::new(delta, params.coupling)?;
    Ok(RunParams { coupling: map.coupling_prime, delta_scale: params.delta_scale * delta, ..params.clone() })
}

/// Pointwise discrepancy of two solutions on the same grid.
pub fn compare_solutions(a: &Solution, b: &Solution) -> Result<Vec<FieldDiscrepancy>> {
    if a.cones.len() != b.cones.len() || a.cones[0].points.len() != b.cones[0].points.len() {
        return Err(Error::GridMismatch("solutions have different grids".into()));
    }
    let names: Vec<&str> = a.cones[0].points[0].fields().iter().map(|f| f.0).collect();
    let mut max = vec![0.0f64; names.len()];
    let mut sq = vec![0.0f64; names.len()];
    let mut n = 0usize;
    for (ca, cb) in a.cones.iter().zip(&b.cones) {
        for (pa, pb) in ca.points.iter().zip(&cb.points) {
            for (k, ((_, x), (_, y))) in pa.fields().iter().zip(pb.fields()).enumerate() {
                let d = (x - y).abs();
                max[k] = max[k].max(d);
                sq[k] += d * d;
            }
            n += 1;
        }
    }
    Ok(names
        .iter()
        .enumerate()
        .filter(|(_, n)| **n != "v")
        .map(|(k, f)| FieldDiscrepancy { field: f.to_string(), max: max[k], l2: (sq[k] / n as f64).sqrt() })
        .collect())
}

/// Runs both branches concurrently and returns `(report, A rescaled, B)`.
pub fn covariance_runs(params: &RunParams, delta: f64) -> Result<(CovarianceReport, Solution, Solution)> {
    if !is_dyadic(delta) {
        return Err(Error::GridMismatch(format!(
            "delta = {delta} is not a power of 2; scaled grids would not align exactly"
        )));
    }
    let pb = rescaled_params(params, delta)?;
    let settings = IntegratorSettings::default();
    let (ra, rb) = std::thread::scope(|sc| {
        let ha = sc.spawn(|| run_with(params, &settings));
        let hb = sc.spawn(|| run_with(&pb, &settings));
        (ha.join().expect("branch A panicked"), hb.join().expect("branch B panicked"))
    });
    let a = ra?;
    let b = rb?;
    let a_scaled = Solution { cones: a.cones.iter().map(|c| rescale_cone(c, delta)).collect(), ..a };
    let fields = compare_solutions(&a_scaled, &b)?;
    Ok((CovarianceReport { delta, coupling: params.coupling, coupling_prime: pb.coupling, fields }, a_scaled, b))
}

pub fn covariance_report(params: &RunParams, delta: f64) -> Result<CovarianceReport> {
    covariance_runs(params, delta).map(|r| r.0)
}
