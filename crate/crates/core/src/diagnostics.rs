//! Observables: expansions and trapping, Hawking mass, charge, scale-invariant
//! norms, the renormalized incoming scalar derivative and decay fits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chardata::trapezoid_nonuniform;
use crate::error::{Error, Result};
use crate::evolve::Solution;
use crate::grid::{ConeData, PointState};
use crate::matter::matter_components;

pub use crate::matter::psi3_tilde;

/// Relative mass floor (in units of `a`) below which `Q/m` is not reported.
pub const QM_MASS_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SphereDiag {
    pub u: f64,
    pub v: f64,
    pub exp_out: f64,
    pub exp_in: f64,
    pub trapped: bool,
    pub m: f64,
    pub q: f64,
    pub q_over_m: Option<f64>,
}

pub fn hawking_mass(s: &PointState) -> f64 {
    0.5 * s.r * (1.0 + 0.25 * s.r * s.r * s.trchi * s.trchib)
}

pub fn charge(s: &PointState) -> f64 {
    s.r * s.r * s.rho_f
}

pub fn sphere_diag(s: &PointState, a: f64) -> SphereDiag {
    let om = s.big_omega();
    let exp_out = s.trchi / om;
    let exp_in = om * s.trchib;
    let m = hawking_mass(s);
    let q = charge(s);
    SphereDiag {
        u: s.u,
        v: s.v,
        exp_out,
        exp_in,
        trapped: exp_out < 0.0 && exp_in < 0.0,
        m,
        q,
        q_over_m: (m > QM_MASS_FLOOR * a).then(|| q / m),
    }
}

/// `∫ 2𝔢 r² Ω Im(ψΨ4†) dv` along a cone (trapezoid rule).
pub fn charge_flux(cone: &ConeData, coupling: f64) -> f64 {
    let f: Vec<f64> =
        cone.points.iter().map(|p| 2.0 * coupling * p.r * p.r * p.big_omega() * (p.psi * p.psi4.conj()).im).collect();
    trapezoid_nonuniform(&cone.points, &f)
}

/// `|Q(u,1) - Q(u,0) - ∫2𝔢r²Ω Im(ψΨ4†) dv|`.
pub fn charge_identity_defect(cone: &ConeData, coupling: f64) -> f64 {
    let q1 = charge(cone.points.last().unwrap());
    let q0 = charge(&cone.points[0]);
    (q1 - q0 - charge_flux(cone, coupling)).abs()
}

/// `∫ (r²/4) S44 Ω dv`, the leading part of the mass gained along a cone.
pub fn mass_flux(cone: &ConeData, coupling: f64) -> f64 {
    let f: Vec<f64> =
        cone.points.iter().map(|p| 0.25 * p.r * p.r * matter_components(p, coupling).s44 * p.big_omega()).collect();
    trapezoid_nonuniform(&cone.points, &f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    Linf,
    L2,
    L1,
}

/// Scale-invariant norm of a spherically symmetric field sampled on one sphere.
///
/// `area` is the sphere area; the sphere integral of `φ` is `area · φ`.
pub fn sc_norm(values: &[f64], area: f64, s2: f64, kind: NormKind, a: f64, u: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let au = a.powf(-s2);
    let uu = u.abs();
    match kind {
        NormKind::Linf => au * uu.powf(2.0 * s2 + 1.0) * values.iter().fold(0.0, |m, x| f64::max(m, x.abs())),
        NormKind::L2 => au * uu.powf(2.0 * s2) * (values.iter().map(|x| x * x).sum::<f64>() / n * area).sqrt(),
        NormKind::L1 => au * uu.powf(2.0 * s2 - 1.0) * values.iter().map(|x| x.abs()).sum::<f64>() / n * area,
    }
}

/// Same as [`sc_norm`], looking the signature up by symbol.
pub fn sc_norm_symbol(values: &[f64], area: f64, symbol: &str, kind: NormKind, a: f64, u: f64) -> Result<f64> {
    let reg = crate::sigcalc::Registry::standard();
    let s2 = reg.s2(symbol).map_err(|_| Error::UnknownSymbol(symbol.to_string()))?.as_f64();
    Ok(sc_norm(values, area, s2, kind, a, u))
}

/// Fields accepted by [`fit_decay`].
pub const DECAY_SYMBOLS: [&str; 6] = ["psi", "Psi4", "rhoF", "Ub", "Psi3t", "trchibt"];

fn decay_field(symbol: &str, p: &PointState) -> Result<f64> {
    Ok(match symbol {
        "psi" => p.psi.norm(),
        "Psi4" => p.psi4.norm(),
        "rhoF" => p.rho_f.abs(),
        "Ub" => p.ub.abs(),
        "Psi3t" => psi3_tilde(p).norm(),
        "trchibt" => (p.trchib + 2.0 / (p.big_omega() * p.u.abs())).abs(),
        _ => return Err(Error::UnknownSymbol(symbol.to_string())),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayFit {
    pub symbol: String,
    pub u_exponent: Option<f64>,
    pub a_exponent: Option<f64>,
    pub r_squared: Option<f64>,
    pub intercept: Option<f64>,
    pub samples: usize,
    pub flag: Option<String>,
}

/// Least squares `y = c + p x`; returns `(p, c, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let p = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (p, my - p * mx, r2)
}

fn tail_samples(sol: &Solution, symbol: &str, v_star: f64) -> Result<(Vec<f64>, Vec<f64>, bool)> {
    let pts = &sol.cones[0].points;
    let j = pts
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.v - v_star).abs().total_cmp(&(b.1.v - v_star).abs()))
        .map(|(j, _)| j)
        .ok_or_else(|| Error::InsufficientSamples("empty cone".into()))?;
    let u0 = sol.cones[0].u;
    let u1 = sol.final_cone().u;
    let cut = u0 + 0.1 * (u1 - u0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut all_zero = true;
    for c in sol.cones.iter().filter(|c| c.u >= cut) {
        let f = decay_field(symbol, &c.points[j])?;
        if f != 0.0 {
            all_zero = false;
            xs.push(c.u.abs().ln());
            ys.push(f.ln());
        }
    }
    Ok((xs, ys, all_zero))
}

/// Power-law fit of `|field(u, v*)|` against `|u|` over the tail of the u-range
/// (the first 10% of cones are excluded).
pub fn fit_decay(sol: &Solution, symbol: &str, v_star: f64) -> Result<DecayFit> {
    let (xs, ys, zero) = tail_samples(sol, symbol, v_star)?;
    let mut fit = DecayFit {
        symbol: symbol.to_string(),
        u_exponent: None,
        a_exponent: None,
        r_squared: None,
        intercept: None,
        samples: xs.len(),
        flag: None,
    };
    if zero {
        fit.flag = Some("identically zero".into());
        return Ok(fit);
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientSamples(format!(
            "{symbol}: {} non-zero tail samples, need at least 4",
            xs.len()
        )));
    }
    let (p, c, r2) = linear_fit(&xs, &ys);
    fit.u_exponent = Some(p);
    fit.intercept = Some(c);
    fit.r_squared = Some(r2);
    Ok(fit)
}

/// Joint fit over runs at different `a`: the u-exponent is the mean of the
/// per-run slopes, and the a-exponent is the slope of the per-run intercepts
/// (refitted at that common u-exponent) against `ln a`.
pub fn fit_decay_sweep(sols: &[&Solution], symbol: &str, v_star: f64) -> Result<DecayFit> {
    if sols.len() < 3 {
        return Err(Error::InsufficientSamples(format!("a-sweep needs at least 3 runs, got {}", sols.len())));
    }
    let mut slopes = Vec::new();
    let mut samples = Vec::new();
    for s in sols {
        let f = fit_decay(s, symbol, v_star)?;
        if f.flag.is_some() {
            return Ok(f);
        }
        slopes.push(f.u_exponent.unwrap());
        samples.push(tail_samples(s, symbol, v_star)?);
    }
    let p = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let la: Vec<f64> = sols.iter().map(|s| s.params().a.ln()).collect();
    let cs: Vec<f64> =
        samples.iter().map(|(x, y, _)| x.iter().zip(y).map(|(x, y)| y - p * x).sum::<f64>() / x.len() as f64).collect();
    let (q, _, r2) = linear_fit(&la, &cs);
    Ok(DecayFit {
        symbol: symbol.to_string(),
        u_exponent: Some(p),
        a_exponent: Some(q),
        r_squared: Some(r2),
        intercept: None,
        samples: samples.iter().map(|s| s.0.len()).sum(),
        flag: None,
    })
}

/// `Ψ̃3` evaluated from its defining form `|u|⁻¹ e3(|u|ψ) + i𝔢U̲ψ` given `∂_u ψ`.
pub fn psi3_tilde_from_derivative(s: &PointState, dpsi_du: Complex64, coupling: f64) -> Complex64 {
    let uu = s.u.abs();
    let om = s.big_omega();
    // ∂_u |u| = -1 for u < 0
    (uu * dpsi_du - s.psi) / (uu * om) + Complex64::new(0.0, coupling * s.ub) * s.psi
}
