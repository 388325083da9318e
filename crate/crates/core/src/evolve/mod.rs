//! Marching across the rectangle in u.
//!
//! Each step advances the u-evolved set by Heun's method on the deviation from
//! the flat solution, re-integrating `{ω̲, U̲, Ψ3}` along the predicted and the
//! corrected cone from their flat seeds at `v = 0`. The expansions are carried
//! as `r·trχ` and `r·trχ̲`, which are constant on the flat background.

mod checkpoint;

pub use checkpoint::{checkpoint, restore, CHECKPOINT_VERSION};

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chardata::{complete_outgoing_cone, verify_lower_bounds, LowerBoundReport};
use crate::error::{Error, Result};
use crate::grid::{make_grid, minkowski_unchecked, ConeData, PointState, RunParams};
use crate::matter::{constraint_residuals, gauss_rho, matter_components, rhs_u_with, rhs_v, Residuals, RhoFSource};

pub const DEFAULT_CEILING: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegratorSettings {
    pub ceiling: f64,
    pub rho_f_source: RhoFSource,
    /// Trapezoidal corrector evaluations per u-step (1 is plain Heun).
    pub corrector_passes: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings { ceiling: DEFAULT_CEILING, rho_f_source: RhoFSource::Psi3, corrector_passes: 1 }
    }
}

/// One row of the per-cone diagnostic series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagRow {
    pub u: f64,
    pub q_end: f64,
    pub m_end: f64,
    pub min_trchi: f64,
    pub min_trchib: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunMeta {
    pub params: RunParams,
    pub settings: IntegratorSettings,
    pub wall_clock_s: f64,
    pub lower_bounds: LowerBoundReport,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub cones: Vec<ConeData>,
    pub residual_history: Vec<Residuals>,
    pub diagnostics: Vec<DiagRow>,
    pub meta: RunMeta,
}

impl Solution {
    pub fn params(&self) -> &RunParams {
        &self.meta.params
    }

    pub fn final_cone(&self) -> &ConeData {
        self.cones.last().expect("solution has at least one cone")
    }

    /// Field data equality, ignoring wall-clock time.
    pub fn same_fields(&self, o: &Solution) -> bool {
        self.cones == o.cones && self.residual_history == o.residual_history && self.diagnostics == o.diagnostics
    }
}

/// Residuals on each v-interval `[j, j+1]` of a cone.
pub fn cone_residuals(points: &[PointState], dv: f64, coupling: f64) -> Vec<Residuals> {
    points.windows(2).map(|w| constraint_residuals(&w[0], &w[1], dv, coupling)).collect()
}

fn max_residuals(points: &[PointState], dv: f64, coupling: f64) -> Residuals {
    cone_residuals(points, dv, coupling).iter().fold(Residuals::default(), |m, r| m.max_with(r))
}

pub fn diag_row(cone: &ConeData) -> DiagRow {
    let last = cone.points.last().expect("non-empty cone");
    let d = crate::diagnostics::sphere_diag(last, 1.0);
    DiagRow {
        u: cone.u,
        q_end: d.q,
        m_end: d.m,
        min_trchi: cone.points.iter().map(|p| p.trchi).fold(f64::INFINITY, f64::min),
        min_trchib: cone.points.iter().map(|p| p.trchib).fold(f64::INFINITY, f64::min),
    }
}

const NY: usize = 10;
const NZ: usize = 4;
type Y = [f64; NY];
type Z = [f64; NZ];

fn split(p: &PointState) -> (Y, Z) {
    (
        [p.r * p.trchib, p.r * p.trchi, p.omega, p.rho_f, p.psi4.re, p.psi4.im, p.psi.re, p.psi.im, p.r, p.ln_omega],
        [p.omegab, p.ub, p.psi3.re, p.psi3.im],
    )
}

fn join(u: f64, v: f64, y: &Y, z: &Z) -> PointState {
    PointState {
        u,
        v,
        r: y[8],
        ln_omega: y[9],
        trchi: y[1] / y[8],
        trchib: y[0] / y[8],
        omega: y[2],
        omegab: z[0],
        rho_f: y[3],
        ub: z[1],
        psi: Complex64::new(y[6], y[7]),
        psi4: Complex64::new(y[4], y[5]),
        psi3: Complex64::new(z[2], z[3]),
    }
}

/// Flat values of Y at (u, v) and their u-derivatives.
fn background(u: f64, v: f64) -> (Y, Y) {
    let r = v - u;
    let mut y = [0.0; NY];
    let mut dy = [0.0; NY];
    y[0] = -2.0;
    y[1] = 2.0;
    y[8] = r;
    dy[8] = -1.0;
    (y, dy)
}

fn f_u(p: &PointState, e: f64, src: RhoFSource) -> Y {
    let m = matter_components(p, e);
    let rho = gauss_rho(p, &m);
    let d = rhs_u_with(p, &m, rho, e, src);
    [
        d.trchib * p.r + p.trchib * d.r,
        d.trchi * p.r + p.trchi * d.r,
        d.omega,
        d.rho_f,
        d.psi4.re,
        d.psi4.im,
        d.psi.re,
        d.psi.im,
        d.r,
        d.ln_omega,
    ]
}

fn f_v(p: &PointState, e: f64) -> Z {
    let m = matter_components(p, e);
    let d = rhs_v(p, &m, gauss_rho(p, &m), e);
    [d.omegab, d.ub, d.psi3.re, d.psi3.im]
}

/// Affine map `Z ↦ A Z + b` of the v-equations at fixed Y (they are linear in Z).
fn affine_v(u: f64, v: f64, y: &Y, e: f64) -> ([[f64; NZ]; NZ], Z) {
    let b = f_v(&join(u, v, y, &[0.0; NZ]), e);
    let mut a = [[0.0; NZ]; NZ];
    for k in 0..NZ {
        let mut z = [0.0; NZ];
        z[k] = 1.0;
        let f = f_v(&join(u, v, y, &z), e);
        for i in 0..NZ {
            a[i][k] = f[i] - b[i];
        }
    }
    (a, b)
}

fn solve4(mut m: [[f64; NZ]; NZ], mut x: Z) -> Z {
    for c in 0..NZ {
        let p = (c..NZ).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        x.swap(c, p);
        for i in c + 1..NZ {
            let f = m[i][c] / m[c][c];
            for k in c..NZ {
                m[i][k] -= f * m[c][k];
            }
            x[i] -= f * x[c];
        }
    }
    for c in (0..NZ).rev() {
        for k in c + 1..NZ {
            x[c] -= m[c][k] * x[k];
        }
        x[c] /= m[c][c];
    }
    x
}

/// Trapezoidal rule in v for Z along a cone with Y given at every level.
/// The v-equations are affine in Z, so each step is one 4×4 linear solve.
fn integrate_z(u: f64, vs: &[f64], ys: &[Y], dv: f64, e: f64) -> Vec<Z> {
    let mut zs = Vec::with_capacity(ys.len());
    let mut z = [0.0; NZ];
    zs.push(z);
    let (mut a0, mut b0) = affine_v(u, vs[0], &ys[0], e);
    for j in 0..ys.len() - 1 {
        let (a1, b1) = affine_v(u, vs[j + 1], &ys[j + 1], e);
        let mut rhs = [0.0; NZ];
        let mut m = [[0.0; NZ]; NZ];
        for i in 0..NZ {
            let mut az = 0.0;
            for k in 0..NZ {
                az += a0[i][k] * z[k];
                m[i][k] = -0.5 * dv * a1[i][k];
            }
            m[i][i] += 1.0;
            rhs[i] = z[i] + 0.5 * dv * (az + b0[i] + b1[i]);
        }
        z = solve4(m, rhs);
        zs.push(z);
        a0 = a1;
        b0 = b1;
    }
    zs
}

fn check_point(p: &PointState, ceiling: f64) -> Result<()> {
    if !(p.r > 0.0) {
        return Err(Error::HorizonBreach { u: p.u, v: p.v });
    }
    p.check_finite()?;
    for (name, x) in p.fields() {
        if x.abs() > ceiling {
            return Err(Error::Blowup { u: p.u, v: p.v, field: name });
        }
    }
    Ok(())
}

/// Advances `current` by `du > 0` with default settings.
pub fn step_cone(current: &ConeData, du: f64, params: &RunParams) -> Result<ConeData> {
    step_cone_with(current, du, params, &IntegratorSettings::default())
}

pub fn step_cone_with(
    current: &ConeData,
    du: f64,
    params: &RunParams,
    settings: &IntegratorSettings,
) -> Result<ConeData> {
    if !(du > 0.0) || !du.is_finite() {
        return Err(Error::Precondition(format!("u-step must be positive, got {du}")));
    }
    let pts = &current.points;
    if pts.len() < 2 {
        return Err(Error::Precondition("cone needs at least two points".into()));
    }
    let e = params.coupling;
    let src = settings.rho_f_source;
    let (u0, u1) = (current.u, current.u + du);
    let vs: Vec<f64> = pts.iter().map(|p| p.v).collect();
    let dv = vs[1] - vs[0];
    let n = pts.len();

    let mut dy0 = Vec::with_capacity(n);
    let mut k0 = Vec::with_capacity(n);
    let mut ystar = Vec::with_capacity(n);
    for (j, p) in pts.iter().enumerate() {
        let (y, _) = split(p);
        let (b0, db0) = background(u0, vs[j]);
        let (b1, _) = background(u1, vs[j]);
        let f = f_u(p, e, src);
        let mut d = [0.0; NY];
        let mut k = [0.0; NY];
        let mut ys = [0.0; NY];
        for i in 0..NY {
            d[i] = y[i] - b0[i];
            k[i] = f[i] - db0[i];
            ys[i] = b1[i] + d[i] + du * k[i];
        }
        if j == 0 {
            ys = split(&minkowski_unchecked(u1, vs[0])).0;
        }
        dy0.push(d);
        k0.push(k);
        ystar.push(ys);
    }
    let mut ycur = ystar;
    let mut zcur = integrate_z(u1, &vs, &ycur, dv, e);
    for _ in 0..settings.corrector_passes.max(1) {
        let mut ynew = Vec::with_capacity(n);
        for j in 0..n {
            let p = join(u1, vs[j], &ycur[j], &zcur[j]);
            check_point(&p, settings.ceiling)?;
            if j == 0 {
                ynew.push(split(&minkowski_unchecked(u1, vs[0])).0);
                continue;
            }
            let (b1, db1) = background(u1, vs[j]);
            let f = f_u(&p, e, src);
            let mut y = [0.0; NY];
            for i in 0..NY {
                y[i] = b1[i] + dy0[j][i] + 0.5 * du * (k0[j][i] + f[i] - db1[i]);
            }
            ynew.push(y);
        }
        zcur = integrate_z(u1, &vs, &ynew, dv, e);
        ycur = ynew;
    }
    let mut points = Vec::with_capacity(n);
    for j in 0..n {
        let p = join(u1, vs[j], &ycur[j], &zcur[j]);
        check_point(&p, settings.ceiling)?;
        points.push(p);
    }
    let max_residual = max_residuals(&points, dv, e).max_abs();
    Ok(ConeData { u: u1, points, max_residual })
}

/// Evolves the full rectangle with default settings.
pub fn run(params: &RunParams) -> Result<Solution> {
    run_with(params, &IntegratorSettings::default())
}

pub fn run_with(params: &RunParams, settings: &IntegratorSettings) -> Result<Solution> {
    let t0 = Instant::now();
    let grid = make_grid(params)?;
    let first = complete_outgoing_cone(params, &params.pulse)?;
    let lower_bounds = verify_lower_bounds(&first, params);
    let mut warnings = Vec::new();
    if !(lower_bounds.trap_pass && lower_bounds.charge_pass) {
        warnings.push("bounds-unmet".to_string());
    }
    let e = params.coupling;
    let mut residual_history = vec![max_residuals(&first.points, grid.dv, e)];
    let mut diagnostics = vec![diag_row(&first)];
    let mut cones = Vec::with_capacity(params.n_u + 1);
    cones.push(first);
    for n in 0..params.n_u {
        let du = grid.u[n + 1] - grid.u[n];
        let mut next = step_cone_with(&cones[n], du, params, settings)?;
        // pin the level to the exact grid value
        next.u = grid.u[n + 1];
        for p in &mut next.points {
            p.u = grid.u[n + 1];
        }
        residual_history.push(max_residuals(&next.points, grid.dv, e));
        diagnostics.push(diag_row(&next));
        cones.push(next);
    }
    Ok(Solution {
        cones,
        residual_history,
        diagnostics,
        meta: RunMeta {
            params: params.clone(),
            settings: *settings,
            wall_clock_s: t0.elapsed().as_secs_f64(),
            lower_bounds,
            warnings,
        },
    })
}

/// Runs independent parameter sets on scoped threads, preserving order.
pub fn run_many(params: &[RunParams], settings: &IntegratorSettings) -> Vec<Result<Solution>> {
    std::thread::scope(|sc| {
        let hs: Vec<_> = params.iter().map(|p| sc.spawn(move || run_with(p, settings))).collect();
        hs.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}
