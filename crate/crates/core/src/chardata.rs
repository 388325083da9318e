//! Characteristic initial data: the short pulse on the outgoing cone `u = u∞`,
//! its completion through the e4 hierarchy, flat data on `v = 0`, and the
//! lower-bound hypotheses of the trapping and charging statements.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{make_grid, minkowski_state, ConeData, PointState, RunParams};
use crate::matter::{gauss_rho, matter_components};

/// Number of Simpson panels used for profile quadratures.
pub const QUAD_PANELS: usize = 2048;
/// Minimum number of v-cells the pulse support must span.
pub const MIN_SUPPORT_CELLS: f64 = 8.0;
/// Target ratio of each lower-bound integral to its threshold after calibration.
pub const CALIBRATION_MARGIN: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ProfileKind {
    SmoothBump,
    #[default]
    SineSquared,
}

/// Free-data knobs. `support` is given in the normalized coordinate `s = v/δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PulseShape {
    pub amp: f64,
    pub phase_rate: f64,
    pub support: (f64, f64),
    pub profile_kind: ProfileKind,
}

impl Default for PulseShape {
    fn default() -> Self {
        PulseShape { amp: 1.0, phase_rate: 0.0, support: (0.1, 0.9), profile_kind: ProfileKind::SineSquared }
    }
}

impl PulseShape {
    pub fn validate(&self) -> Result<()> {
        let (v0, v1) = self.support;
        if !(0.0 <= v0 && v0 < v1 && v1 <= 1.0) {
            return Err(Error::InvalidParams(format!("pulse support ({v0}, {v1}) must satisfy 0 <= v0 < v1 <= 1")));
        }
        if !(self.amp >= 0.0) || !self.amp.is_finite() {
            return Err(Error::InvalidParams("pulse amp must be non-negative".into()));
        }
        if !self.phase_rate.is_finite() {
            return Err(Error::InvalidParams("pulse phaseRate must be finite".into()));
        }
        Ok(())
    }

    /// A zero-amplitude shape; the run is pure Minkowski.
    pub fn vacuum() -> Self {
        PulseShape { amp: 0.0, ..PulseShape::default() }
    }
}

/// Unnormalized profile `g(s)` and `g'(s)`.
pub fn profile(kind: ProfileKind, support: (f64, f64), s: f64) -> (f64, f64) {
    let (v0, v1) = support;
    if s <= v0 || s >= v1 {
        return (0.0, 0.0);
    }
    let l = v1 - v0;
    match kind {
        ProfileKind::SineSquared => {
            let th = std::f64::consts::PI * (s - v0) / l;
            (th.sin().powi(2), std::f64::consts::PI / l * (2.0 * th).sin())
        }
        ProfileKind::SmoothBump => {
            let x = (2.0 * s - v0 - v1) / l;
            let q = 1.0 - x * x;
            let g = (1.0 - 1.0 / q).exp();
            (g, g * (-2.0 * x / (q * q)) * (2.0 / l))
        }
    }
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}

/// Quadratures of the profile: `G0 = ∫g²`, `G1 = ∫g'²`, `W0 = ∫((s+Ka)/(Ka))² g²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileIntegrals {
    pub g0: f64,
    pub g1: f64,
    pub w0: f64,
}

pub fn profile_integrals(shape: &PulseShape, params: &RunParams) -> ProfileIntegrals {
    let (v0, v1) = shape.support;
    let ka = params.u_inf_factor * params.a;
    let g = |s: f64| profile(shape.profile_kind, shape.support, s);
    ProfileIntegrals {
        g0: simpson(|s| g(s).0.powi(2), v0, v1, QUAD_PANELS),
        g1: simpson(|s| g(s).1.powi(2), v0, v1, QUAD_PANELS),
        w0: simpson(|s| ((s + ka) / ka).powi(2) * g(s).0.powi(2), v0, v1, QUAD_PANELS),
    }
}

/// Evaluator for the free data with the profile normalization precomputed.
///
/// `ψ = (√a / (K a)) · amp · ĝ(s) · e^{iλs}` with `ĝ = g / √(G1 + λ² G0)`, so that
/// `|u∞|² ∫|Ψ4|² dv = δ a amp²` independently of the profile and of λ.
#[derive(Debug, Clone, Copy)]
pub struct FreeData {
    shape: PulseShape,
    scale: f64,
    delta: f64,
}

impl FreeData {
    pub fn new(shape: &PulseShape, params: &RunParams) -> Self {
        let ints = profile_integrals(shape, params);
        let lam = shape.phase_rate;
        let norm = (ints.g1 + lam * lam * ints.g0).sqrt();
        let pre = params.a.sqrt() / (params.u_inf_factor * params.a);
        let scale = if shape.amp == 0.0 { 0.0 } else { pre * shape.amp / norm };
        FreeData { shape: *shape, scale, delta: params.delta_scale }
    }

    /// `(ψ, ∂_v ψ)` at coordinate `v`.
    pub fn eval(&self, v: f64) -> (Complex64, Complex64) {
        let s = v / self.delta;
        let (g, dg) = profile(self.shape.profile_kind, self.shape.support, s);
        if g == 0.0 && dg == 0.0 {
            let z = Complex64::default();
            return (z, z);
        }
        let lam = self.shape.phase_rate;
        let ph = Complex64::from_polar(1.0, lam * s);
        let psi = self.scale * g * ph;
        let psi4 = (self.scale / self.delta) * Complex64::new(dg, lam * g) * ph;
        (psi, psi4)
    }
}

/// `(ψ, Ψ4)` on the initial outgoing cone at coordinate `v`.
pub fn pulse_free_data(shape: &PulseShape, params: &RunParams, v: f64) -> (Complex64, Complex64) {
    FreeData::new(shape, params).eval(v)
}

/// Chooses amp and λ so both lower-bound integrals equal 1.1 times their thresholds
/// (evaluated on the flat areal radius).
///
/// The trapping integral is `δ a amp²`. The charge integral is
/// `4π |λ| amp² δ² a W0 / (G1 + λ² G0)`, so with `amp² = 1.1` the phase rate solves
/// `G0 λ² - 4π W0 |λ| + G1 = 0` (smaller root). When no real root exists λ is set to the
/// charge-maximizing `√(G1/G0)` and amp is raised instead. λ is returned negative so the
/// generated charge is positive.
pub fn calibrate_pulse(shape: &PulseShape, params: &RunParams) -> Result<PulseShape> {
    shape.validate()?;
    if shape.amp == 0.0 {
        return Err(Error::Calibration("cannot meet bound with zero amplitude".into()));
    }
    let (v0, v1) = shape.support;
    if (v1 - v0) * (params.n_v as f64) < MIN_SUPPORT_CELLS {
        return Err(Error::Calibration(format!(
            "support too narrow: ({v0}, {v1}) spans fewer than {MIN_SUPPORT_CELLS} cells of the v-grid"
        )));
    }
    let ints = profile_integrals(shape, params);
    let four_pi = 4.0 * std::f64::consts::PI;
    let disc = (four_pi * ints.w0).powi(2) - 4.0 * ints.g0 * ints.g1;
    let (lam, amp2) = if disc >= 0.0 {
        ((four_pi * ints.w0 - disc.sqrt()) / (2.0 * ints.g0), CALIBRATION_MARGIN)
    } else {
        let lam = (ints.g1 / ints.g0).sqrt();
        let per_amp2 = four_pi * lam * ints.w0 / (ints.g1 + lam * lam * ints.g0);
        let amp2 = CALIBRATION_MARGIN / per_amp2;
        if amp2 > 1.5 {
            return Err(Error::Calibration(format!(
                "trapping integral {amp2:.3}·a would exceed 1.5·a for this support"
            )));
        }
        (lam, amp2)
    };
    Ok(PulseShape { amp: amp2.sqrt(), phase_rate: -lam, ..*shape })
}

/// Flat data on the incoming cone `v = 0` at every u-level.
pub fn incoming_minkowski(params: &RunParams) -> Result<Vec<PointState>> {
    make_grid(params)?.u.iter().map(|&u| minkowski_state(u, 0.0)).collect()
}

const NW: usize = 8;

/// Background (flat) values of the hierarchy vector and their v-derivatives.
fn cone_background(u: f64, v: f64) -> ([f64; NW], [f64; NW]) {
    let r = v - u;
    let mut w = [0.0; NW];
    let mut dw = [0.0; NW];
    w[0] = 2.0 / r;
    dw[0] = -2.0 / (r * r);
    w[1] = r;
    dw[1] = 1.0;
    w[6] = -2.0 / r;
    dw[6] = 2.0 / (r * r);
    (w, dw)
}

fn cone_point(u: f64, v: f64, w: &[f64; NW], psi: Complex64, psi4: Complex64) -> PointState {
    PointState {
        u,
        v,
        r: w[1],
        ln_omega: 0.0,
        trchi: w[0],
        trchib: w[6],
        omega: 0.0,
        omegab: w[7],
        rho_f: w[2],
        ub: w[3],
        psi,
        psi4,
        psi3: Complex64::new(w[4], w[5]),
    }
}

/// `∂_v` of `[trχ, r, ρ_F, U̲, Ψ3, trχ̲, ω̲]` on a cone with `Ω = 1`, `ω = 0`.
fn cone_rhs(s: &PointState, e: f64) -> [f64; NW] {
    let m = matter_components(s, e);
    let rho = gauss_rho(s, &m);
    let i = Complex64::new(0.0, 1.0);
    let dpsi3 = -0.5 * s.trchi * s.psi3 - 0.5 * s.trchib * s.psi4 - i * e * s.rho_f * s.psi;
    [
        -0.5 * s.trchi * s.trchi - m.s44,
        0.5 * s.trchi * s.r,
        -s.trchi * s.rho_f + 2.0 * e * (s.psi * s.psi4.conj()).im,
        -2.0 * s.rho_f,
        dpsi3.re,
        dpsi3.im,
        -0.5 * s.trchi * s.trchib + 2.0 * rho + m.tr_s,
        0.5 * rho + 0.25 * (m.tr_ssl - m.tr_s),
    ]
}

/// Integrates the e4 hierarchy along `u = u∞` from flat seeds at `v = 0`.
///
/// All eight unknowns are advanced together by Heun's method applied to the
/// deviation from the flat solution, so flat data is reproduced exactly.
pub fn complete_outgoing_cone(params: &RunParams, shape: &PulseShape) -> Result<ConeData> {
    let grid = make_grid(params)?;
    let u = grid.u[0];
    let h = grid.dv;
    let fd = FreeData::new(shape, params);
    let e = params.coupling;
    let mut points = Vec::with_capacity(grid.v.len());
    points.push(minkowski_state(u, 0.0)?);
    let mut dw = [0.0; NW];
    for j in 0..params.n_v {
        let (v0, v1) = (grid.v[j], grid.v[j + 1]);
        let (b0, db0) = cone_background(u, v0);
        let (b1, db1) = cone_background(u, v1);
        let (p0, q0) = fd.eval(v0);
        let (p1, q1) = fd.eval(v1);
        let mut w0 = [0.0; NW];
        for k in 0..NW {
            w0[k] = b0[k] + dw[k];
        }
        let f0 = cone_rhs(&cone_point(u, v0, &w0, p0, q0), e);
        let mut wp = [0.0; NW];
        let mut dwp = [0.0; NW];
        for k in 0..NW {
            dwp[k] = dw[k] + h * (f0[k] - db0[k]);
            wp[k] = b1[k] + dwp[k];
        }
        let f1 = cone_rhs(&cone_point(u, v1, &wp, p1, q1), e);
        let mut w1 = [0.0; NW];
        for k in 0..NW {
            dw[k] += 0.5 * h * ((f0[k] - db0[k]) + (f1[k] - db1[k]));
            w1[k] = b1[k] + dw[k];
        }
        let pt = cone_point(u, v1, &w1, p1, q1);
        if !(pt.r > 0.0) {
            return Err(Error::HorizonBreach { u, v: v1 });
        }
        pt.check_finite()?;
        points.push(pt);
    }
    let max_residual = crate::evolve::cone_residuals(&points, h, e).iter().fold(0.0, |m, r| f64::max(m, r.max_abs()));
    Ok(ConeData { u, points, max_residual })
}

/// Lower-bound hypotheses evaluated on a completed initial cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerBoundReport {
    pub trap_cond_min: f64,
    pub charge_cond: f64,
    pub trap_target: f64,
    pub charge_target: f64,
    pub trap_pass: bool,
    pub charge_pass: bool,
}

/// Trapezoid-rule evaluation of `∫|u∞|²|Ψ4|² dv` and `|∫4πr²Ω Im(ψΨ4†) dv|`.
///
/// Thresholds are `a` for both at `δ = 1`, and scale as `δ a` and `δ² a` otherwise.
pub fn verify_lower_bounds(cone: &ConeData, params: &RunParams) -> LowerBoundReport {
    let pts = &cone.points;
    let uu = cone.u * cone.u;
    let trap_f: Vec<f64> = pts.iter().map(|p| uu * p.psi4.norm_sqr()).collect();
    let charge_f: Vec<f64> = pts
        .iter()
        .map(|p| 4.0 * std::f64::consts::PI * p.r * p.r * p.big_omega() * (p.psi * p.psi4.conj()).im)
        .collect();
    let trap = trapezoid_nonuniform(pts, &trap_f);
    let charge = trapezoid_nonuniform(pts, &charge_f).abs();
    let d = params.delta_scale;
    let trap_target = params.a * d;
    let charge_target = params.a * d * d;
    LowerBoundReport {
        trap_cond_min: trap,
        charge_cond: charge,
        trap_target,
        charge_target,
        trap_pass: trap >= trap_target,
        charge_pass: charge >= charge_target,
    }
}

pub(crate) fn trapezoid_nonuniform(pts: &[PointState], f: &[f64]) -> f64 {
    pts.windows(2).zip(f.windows(2)).map(|(p, y)| 0.5 * (p[1].v - p[0].v) * (y[0] + y[1])).sum()
}
