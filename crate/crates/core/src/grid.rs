//! Run parameters, the uniform (u, v) grid, point/cone containers and the
//! flat reference solution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chardata::PulseShape;
use crate::error::{Error, Result};

/// Parameters of one evolution run.
///
/// With `delta_scale = δ` the rectangle is `[-δ K a, -δ a/4] × [0, δ]`; `δ = 1`
/// is the unscaled problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunParams {
    pub a: f64,
    pub coupling: f64,
    pub u_inf_factor: f64,
    pub n_u: usize,
    pub n_v: usize,
    pub pulse: PulseShape,
    pub delta_scale: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            a: 40.0,
            coupling: 0.01,
            u_inf_factor: 4.0,
            n_u: 200,
            n_v: 200,
            pulse: PulseShape::default(),
            delta_scale: 1.0,
        }
    }
}

impl RunParams {
    /// Checks every invariant, naming the first bound that fails.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if !(self.a > 1.0) || !self.a.is_finite() {
            return bad("a must exceed 1");
        }
        if !(self.coupling > 0.0) || !self.coupling.is_finite() {
            return bad("coupling must be positive");
        }
        if !(self.u_inf_factor >= 2.0) || !self.u_inf_factor.is_finite() {
            return bad("uInfFactor must be at least 2");
        }
        if self.n_u < 2 {
            return bad("nU must be at least 2");
        }
        if self.n_v < 2 {
            return bad("nV must be at least 2");
        }
        if !(self.delta_scale > 0.0) || !self.delta_scale.is_finite() {
            return bad("deltaScale must be positive");
        }
        self.pulse.validate()
    }

    /// Initial retarded time `u∞ = -δ K a`.
    pub fn u_inf(&self) -> f64 {
        -self.delta_scale * self.u_inf_factor * self.a
    }

    /// Final retarded time `-δ a / 4`.
    pub fn u_final(&self) -> f64 {
        -self.delta_scale * self.a / 4.0
    }

    /// Length of the v-interval.
    pub fn v_max(&self) -> f64 {
        self.delta_scale
    }
}

/// Uniform levels in both null directions.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub du: f64,
    pub dv: f64,
}

fn levels(start: f64, end: f64, n: usize) -> Vec<f64> {
    let h = (end - start) / n as f64;
    (0..=n).map(|i| if i == n { end } else { start + h * i as f64 }).collect()
}

/// Builds the grid; endpoints are stored exactly.
pub fn make_grid(params: &RunParams) -> Result<GridSpec> {
    params.validate()?;
    let (u0, u1) = (params.u_inf(), params.u_final());
    let du = (u1 - u0) / params.n_u as f64;
    let dv = params.v_max() / params.n_v as f64;
    if !(du > 0.0 && dv > 0.0) {
        return Err(Error::InvalidParams("grid spacings must be positive".into()));
    }
    Ok(GridSpec { u: levels(u0, u1, params.n_u), v: levels(0.0, params.v_max(), params.n_v), du, dv })
}

/// All evolved scalars at one sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointState {
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub ln_omega: f64,
    pub trchi: f64,
    pub trchib: f64,
    pub omega: f64,
    pub omegab: f64,
    pub rho_f: f64,
    pub ub: f64,
    pub psi: Complex64,
    pub psi4: Complex64,
    pub psi3: Complex64,
}

impl PointState {
    pub fn big_omega(&self) -> f64 {
        self.ln_omega.exp()
    }

    /// Named real components, in CSV/checkpoint order.
    pub fn fields(&self) -> [(&'static str, f64); 15] {
        [
            ("r", self.r),
            ("lnOmega", self.ln_omega),
            ("trchi", self.trchi),
            ("trchib", self.trchib),
            ("omega", self.omega),
            ("omegab", self.omegab),
            ("rhoF", self.rho_f),
            ("Ub", self.ub),
            ("psi_re", self.psi.re),
            ("psi_im", self.psi.im),
            ("Psi4_re", self.psi4.re),
            ("Psi4_im", self.psi4.im),
            ("Psi3_re", self.psi3.re),
            ("Psi3_im", self.psi3.im),
            ("v", self.v),
        ]
    }

    /// Fails on the first non-finite field.
    pub fn check_finite(&self) -> Result<()> {
        for (name, x) in self.fields() {
            if !x.is_finite() {
                return Err(Error::NonFinite { u: self.u, v: self.v, field: name });
            }
        }
        Ok(())
    }
}

/// One outgoing cone `H_u`, sampled at every v-level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeData {
    pub u: f64,
    pub points: Vec<PointState>,
    pub max_residual: f64,
}

/// Flat space in the double-null gauge with `Ω = 1`.
pub fn minkowski_state(u: f64, v: f64) -> Result<PointState> {
    let r = v - u;
    if !(r > 0.0) {
        return Err(Error::DegenerateSphere(r));
    }
    Ok(minkowski_unchecked(u, v))
}

pub(crate) fn minkowski_unchecked(u: f64, v: f64) -> PointState {
    let r = v - u;
    let zero = Complex64::new(0.0, 0.0);
    PointState {
        u,
        v,
        r,
        ln_omega: 0.0,
        trchi: 2.0 / r,
        trchib: -2.0 / r,
        omega: 0.0,
        omegab: 0.0,
        rho_f: 0.0,
        ub: 0.0,
        psi: zero,
        psi4: zero,
        psi3: zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_levels_example() {
        let p = RunParams { n_u: 4, n_v: 2, ..RunParams::default() };
        let g = make_grid(&p).unwrap();
        assert_eq!(g.u, vec![-160.0, -122.5, -85.0, -47.5, -10.0]);
        assert_eq!(g.v, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn endpoints_exact_for_awkward_counts() {
        let p = RunParams { a: 37.3, u_inf_factor: 3.7, n_u: 97, n_v: 13, ..RunParams::default() };
        let g = make_grid(&p).unwrap();
        assert_eq!(g.u[0], p.u_inf());
        assert_eq!(*g.u.last().unwrap(), -37.3 / 4.0);
        assert_eq!(*g.v.last().unwrap(), 1.0);
    }

    #[test]
    fn rejects_small_a() {
        let p = RunParams { a: 0.5, ..RunParams::default() };
        let e = make_grid(&p).unwrap_err().to_string();
        assert!(e.contains("a must exceed 1"), "{e}");
    }

    #[test]
    fn rejects_other_bounds() {
        for (p, msg) in [
            (RunParams { coupling: 0.0, ..RunParams::default() }, "coupling"),
            (RunParams { u_inf_factor: 1.5, ..RunParams::default() }, "uInfFactor"),
            (RunParams { n_u: 1, ..RunParams::default() }, "nU"),
            (RunParams { n_v: 1, ..RunParams::default() }, "nV"),
            (RunParams { delta_scale: 0.0, ..RunParams::default() }, "deltaScale"),
        ] {
            assert!(p.validate().unwrap_err().to_string().contains(msg));
        }
    }

    #[test]
    fn minkowski_values() {
        let s = minkowski_state(-10.0, 0.0).unwrap();
        assert_eq!(s.r, 10.0);
        assert_eq!(s.trchib, -0.2);
        assert_eq!(s.trchi / s.big_omega(), 8.0 / 40.0);
        assert!(matches!(minkowski_state(1.0, 1.0), Err(Error::DegenerateSphere(_))));
    }
}
