//! Resolution studies: self-convergence orders of sampled fields and ratios of
//! the constraint residuals under grid doubling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{run_many, IntegratorSettings, Solution};
use crate::grid::{PointState, RunParams};
use crate::matter::Residuals;

/// Fields whose self-convergence order is reported.
pub const ORDER_FIELDS: [&str; 5] = ["r", "trchi", "trchib", "psi", "rhoF"];

fn sample(p: &PointState, field: &str) -> Option<f64> {
    Some(match field {
        "r" => p.r,
        "lnOmega" => p.ln_omega,
        "trchi" => p.trchi,
        "trchib" => p.trchib,
        "omega" => p.omega,
        "omegab" => p.omegab,
        "rhoF" => p.rho_f,
        "Ub" => p.ub,
        _ => return None,
    })
}

fn diff(a: &PointState, b: &PointState, field: &str) -> Result<f64> {
    if field == "psi" {
        return Ok((a.psi - b.psi).norm());
    }
    match (sample(a, field), sample(b, field)) {
        (Some(x), Some(y)) => Ok((x - y).abs()),
        _ => Err(Error::UnknownSymbol(field.to_string())),
    }
}

fn strides(coarse: &Solution, fine: &Solution) -> Result<(usize, usize)> {
    let (cu, cv) = (coarse.cones.len() - 1, coarse.cones[0].points.len() - 1);
    let (fu, fv) = (fine.cones.len() - 1, fine.cones[0].points.len() - 1);
    if fu % cu != 0 || fv % cv != 0 {
        return Err(Error::GridMismatch(format!("{fu}x{fv} does not refine {cu}x{cv}")));
    }
    Ok((fu / cu, fv / cv))
}

/// Maximum of `|coarse - fine|` over the lattice points of `lattice` (the coarsest grid in a study),
/// which both solutions must contain.
pub fn lattice_max_diff(lattice: (usize, usize), coarse: &Solution, fine: &Solution, field: &str) -> Result<f64> {
    let (nu, nv) = lattice;
    let (cu, cv) = (coarse.cones.len() - 1, coarse.cones[0].points.len() - 1);
    if cu % nu != 0 || cv % nv != 0 {
        return Err(Error::GridMismatch(format!("{cu}x{cv} does not refine {nu}x{nv}")));
    }
    let (su, sv) = strides(coarse, fine)?;
    let (lu, lv) = (cu / nu, cv / nv);
    let mut m = 0.0f64;
    for i in 0..=nu {
        let ci = &coarse.cones[i * lu];
        let fi = &fine.cones[i * lu * su];
        for j in 0..=nv {
            m = m.max(diff(&ci.points[j * lv], &fi.points[j * lv * sv], field)?);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldOrder {
    pub field: String,
    /// `max |f_N - f_2N|` for each consecutive pair of resolutions.
    pub diffs: Vec<f64>,
    /// `log2(diffs[k] / diffs[k+1])`.
    pub orders: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualRatio {
    pub name: String,
    /// Maximum residual over the whole run, per resolution.
    pub maxima: Vec<f64>,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceReport {
    pub resolutions: Vec<(usize, usize)>,
    pub fields: Vec<FieldOrder>,
    pub residuals: Vec<ResidualRatio>,
}

impl ConvergenceReport {
    pub fn field(&self, name: &str) -> Option<&FieldOrder> {
        self.fields.iter().find(|f| f.field == name)
    }

    pub fn residual(&self, name: &str) -> Option<&ResidualRatio> {
        self.residuals.iter().find(|r| r.name == name)
    }
}

/// Maximum of each residual over every cone of a run.
pub fn max_residuals(sol: &Solution) -> Residuals {
    sol.residual_history.iter().fold(Residuals::default(), |m, r| m.max_with(r))
}

/// Builds the report from solutions ordered from coarsest to finest.
pub fn convergence_report(sols: &[Solution]) -> Result<ConvergenceReport> {
    if sols.len() < 3 {
        return Err(Error::InsufficientSamples(format!("need 3 resolutions, got {}", sols.len())));
    }
    let lattice = (sols[0].cones.len() - 1, sols[0].cones[0].points.len() - 1);
    let mut fields = Vec::new();
    for f in ORDER_FIELDS {
        let diffs = sols.windows(2).map(|w| lattice_max_diff(lattice, &w[0], &w[1], f)).collect::<Result<Vec<_>>>()?;
        let orders = diffs.windows(2).map(|d| (d[0] / d[1]).log2()).collect();
        fields.push(FieldOrder { field: f.to_string(), diffs, orders });
    }
    let maxima: Vec<[f64; 6]> = sols.iter().map(|s| max_residuals(s).as_array()).collect();
    let residuals = Residuals::names()
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let m: Vec<f64> = maxima.iter().map(|a| a[k]).collect();
            let ratios = m.windows(2).map(|w| w[0] / w[1]).collect();
            ResidualRatio { name: name.to_string(), maxima: m, ratios }
        })
        .collect();
    Ok(ConvergenceReport {
        resolutions: sols.iter().map(|s| (s.params().n_u, s.params().n_v)).collect(),
        fields,
        residuals,
    })
}

/// `params` at `levels` successive doublings of both cell counts.
pub fn doubling_params(params: &RunParams, levels: usize) -> Vec<RunParams> {
    (0..levels).map(|k| RunParams { n_u: params.n_u << k, n_v: params.n_v << k, ..params.clone() }).collect()
}

/// Runs `params` at `levels` resolutions (in parallel) and reports orders and ratios.
pub fn convergence_study(params: &RunParams, levels: usize) -> Result<(ConvergenceReport, Vec<Solution>)> {
    let sols = run_many(&doubling_params(params, levels), &IntegratorSettings::default())
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((convergence_report(&sols)?, sols))
}

/// Field-by-field `max |f_N - f_2N|` on the coarse lattice, for every stored real field.
pub fn truncation_estimate(coarse: &Solution, fine: &Solution) -> Result<Vec<(String, f64)>> {
    let lattice = (coarse.cones.len() - 1, coarse.cones[0].points.len() - 1);
    let (su, sv) = strides(coarse, fine)?;
    let names: Vec<&str> = coarse.cones[0].points[0].fields().iter().map(|f| f.0).filter(|n| *n != "v").collect();
    let mut m = vec![0.0f64; names.len()];
    for i in 0..=lattice.0 {
        for j in 0..=lattice.1 {
            let a = coarse.cones[i].points[j].fields();
            let b = fine.cones[i * su].points[j * sv].fields();
            for (k, ((_, x), (_, y))) in a.iter().zip(b.iter()).filter(|(f, _)| f.0 != "v").enumerate() {
                m[k] = m[k].max((x - y).abs());
            }
        }
    }
    Ok(names.into_iter().map(String::from).zip(m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chardata::PulseShape;

    #[test]
    fn vacuum_study_has_zero_scalar_differences() {
        let p = RunParams { n_u: 8, n_v: 8, pulse: PulseShape::vacuum(), ..RunParams::default() };
        let (rep, sols) = convergence_study(&p, 3).unwrap();
        assert_eq!(rep.resolutions, vec![(8, 8), (16, 16), (32, 32)]);
        assert_eq!(rep.field("psi").unwrap().diffs, vec![0.0, 0.0]);
        assert!(rep.field("r").unwrap().diffs.iter().all(|d| *d < 1e-12));
        let t = truncation_estimate(&sols[0], &sols[1]).unwrap();
        assert_eq!(t.len(), 14);
        assert!(t.iter().all(|(_, d)| *d < 1e-12));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let p = RunParams { n_u: 6, n_v: 6, pulse: PulseShape::vacuum(), ..RunParams::default() };
        let a = crate::evolve::run(&p).unwrap();
        let b = crate::evolve::run(&RunParams { n_u: 9, ..p.clone() }).unwrap();
        assert!(matches!(truncation_estimate(&a, &b), Err(Error::GridMismatch(_))));
        assert!(convergence_report(&[a.clone(), a]).is_err());
    }
}
