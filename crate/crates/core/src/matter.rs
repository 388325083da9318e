//! Right-hand sides of the spherically reduced system.
//!
//! Frame: `e4 = Ω⁻¹∂_v`, `e3 = Ω⁻¹∂_u`, `g(e3, e4) = -2`. All S-tangent tensors
//! vanish, so only scalar Ricci coefficients and matter components survive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::PointState;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Schouten components `S = Ric - R g / 6` and their traces.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatterComponents {
    pub s44: f64,
    pub s33: f64,
    pub s34: f64,
    pub tr_ssl: f64,
    pub tr_s: f64,
    pub rscal: f64,
}

/// Which incoming scalar derivative sources the `∂_u ρ_F` equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RhoFSource {
    /// The gauge-covariant derivative `Ψ3`.
    #[default]
    Psi3,
    /// The renormalized `Ψ̃3 = Ψ3 - ψ/(Ω|u|)`.
    Psi3Tilde,
}

/// `∂_u` of the u-evolved fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UDerivs {
    pub trchib: f64,
    pub trchi: f64,
    pub omega: f64,
    pub rho_f: f64,
    pub psi4: Complex64,
    pub psi: Complex64,
    pub r: f64,
    pub ln_omega: f64,
}

/// `∂_v` of the fields re-integrated along each cone.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VDerivs {
    pub omegab: f64,
    pub ub: f64,
    pub psi3: Complex64,
}

/// `∂_v` forms of the e4 equations that are monitored, not evolved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstraintRhs {
    pub trchi: f64,
    pub trchib: f64,
    pub rho_f: f64,
    pub psi: Complex64,
    pub r: f64,
    pub ln_omega: f64,
}

/// Absolute constraint defects between v-neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Residuals {
    pub ray4: f64,
    pub cross4: f64,
    pub maxwell4: f64,
    pub psi_link: f64,
    pub area4: f64,
    pub lapse4: f64,
}

impl Residuals {
    pub fn as_array(&self) -> [f64; 6] {
        [self.ray4, self.cross4, self.maxwell4, self.psi_link, self.area4, self.lapse4]
    }

    pub fn names() -> [&'static str; 6] {
        ["ray4", "cross4", "maxwell4", "psiLink", "area4", "lapse4"]
    }

    /// Componentwise maximum.
    pub fn max_with(&self, o: &Residuals) -> Residuals {
        Residuals {
            ray4: self.ray4.max(o.ray4),
            cross4: self.cross4.max(o.cross4),
            maxwell4: self.maxwell4.max(o.maxwell4),
            psi_link: self.psi_link.max(o.psi_link),
            area4: self.area4.max(o.area4),
            lapse4: self.lapse4.max(o.lapse4),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }
}

/// Ricci components of the Maxwell-scalar stress tensor in spherical symmetry,
/// converted to Schouten form.
pub fn matter_components(s: &PointState, _coupling: f64) -> MatterComponents {
    let ric44 = 2.0 * s.psi4.norm_sqr();
    let ric33 = 2.0 * s.psi3.norm_sqr();
    let cross = (s.psi3 * s.psi4.conj()).re;
    let rf2 = s.rho_f * s.rho_f;
    let ric34 = 2.0 * cross + 2.0 * rf2;
    let rscal = -2.0 * cross;
    MatterComponents {
        s44: ric44,
        s33: ric33,
        // g34 = -2
        s34: ric34 + rscal / 3.0,
        // Ric_AB = g̸_AB ρ_F², trace over the unit-normalized sphere metric
        tr_ssl: 2.0 * rf2 - rscal / 3.0,
        tr_s: rscal / 3.0,
        rscal,
    }
}

/// Gauss-equation closure for the curvature component ρ, with `K = 1/r²`.
pub fn gauss_rho(s: &PointState, m: &MatterComponents) -> f64 {
    -1.0 / (s.r * s.r) - 0.25 * s.trchi * s.trchib + 0.5 * m.tr_ssl
}

/// `Ψ̃3 = Ψ3 - ψ/(Ω|u|)`.
pub fn psi3_tilde(s: &PointState) -> Complex64 {
    s.psi3 - s.psi / (s.big_omega() * s.u.abs())
}

/// u-derivatives, sourcing `∂_u ρ_F` with `Ψ3`.
pub fn rhs_u(s: &PointState, m: &MatterComponents, rho: f64, coupling: f64) -> UDerivs {
    rhs_u_with(s, m, rho, coupling, RhoFSource::Psi3)
}

/// u-derivatives with a selectable `∂_u ρ_F` source.
pub fn rhs_u_with(s: &PointState, m: &MatterComponents, rho: f64, coupling: f64, source: RhoFSource) -> UDerivs {
    let om = s.big_omega();
    let e = coupling;
    let src3 = match source {
        RhoFSource::Psi3 => s.psi3,
        RhoFSource::Psi3Tilde => psi3_tilde(s),
    };
    UDerivs {
        trchib: om * (-0.5 * s.trchib * s.trchib - 2.0 * s.omegab * s.trchib - m.s33),
        trchi: om * (-0.5 * s.trchi * s.trchib + 2.0 * s.omegab * s.trchi + 2.0 * rho + m.tr_s),
        omega: om * (2.0 * s.omega * s.omegab + 0.5 * rho + 0.25 * (m.tr_ssl - m.tr_s)),
        rho_f: om * (-s.trchib * s.rho_f - 2.0 * e * (s.psi * src3.conj()).im),
        psi4: om
            * (-0.5 * s.trchib * s.psi4 + 2.0 * s.omegab * s.psi4 - I * e * s.ub * s.psi4 - 0.5 * s.trchi * s.psi3
                + I * e * s.rho_f * s.psi),
        psi: om * (s.psi3 - I * e * s.ub * s.psi),
        r: 0.5 * om * s.trchib * s.r,
        ln_omega: -2.0 * om * s.omegab,
    }
}

/// v-derivatives of `ω̲`, `U̲`, `Ψ3` (gauge `U = 0`).
pub fn rhs_v(s: &PointState, m: &MatterComponents, rho: f64, coupling: f64) -> VDerivs {
    let om = s.big_omega();
    VDerivs {
        omegab: om * (2.0 * s.omega * s.omegab + 0.5 * rho + 0.25 * (m.tr_ssl - m.tr_s)),
        ub: om * (-2.0 * s.rho_f + 2.0 * s.omega * s.ub),
        psi3: om
            * (-0.5 * s.trchi * s.psi3 + 2.0 * s.omega * s.psi3
                - 0.5 * s.trchib * s.psi4
                - I * coupling * s.rho_f * s.psi),
    }
}

/// `∂_v` right-hand sides of the e4 constraint equations.
pub fn constraint_rhs(s: &PointState, coupling: f64) -> ConstraintRhs {
    let m = matter_components(s, coupling);
    let rho = gauss_rho(s, &m);
    let om = s.big_omega();
    ConstraintRhs {
        trchi: om * (-0.5 * s.trchi * s.trchi - 2.0 * s.omega * s.trchi - m.s44),
        trchib: om * (-0.5 * s.trchi * s.trchib + 2.0 * s.omega * s.trchib + 2.0 * rho + m.tr_s),
        rho_f: om * (-s.trchi * s.rho_f + 2.0 * coupling * (s.psi * s.psi4.conj()).im),
        psi: om * s.psi4,
        r: 0.5 * om * s.trchi * s.r,
        ln_omega: -2.0 * om * s.omega,
    }
}

/// `|(X_R - X_L)/Δv - mean(RHS_L, RHS_R)|` for each monitored e4 equation.
pub fn constraint_residuals(left: &PointState, right: &PointState, dv: f64, coupling: f64) -> Residuals {
    let fl = constraint_rhs(left, coupling);
    let fr = constraint_rhs(right, coupling);
    let res = |xl: f64, xr: f64, gl: f64, gr: f64| ((xr - xl) / dv - 0.5 * (gl + gr)).abs();
    Residuals {
        ray4: res(left.trchi, right.trchi, fl.trchi, fr.trchi),
        cross4: res(left.trchib, right.trchib, fl.trchib, fr.trchib),
        maxwell4: res(left.rho_f, right.rho_f, fl.rho_f, fr.rho_f),
        psi_link: ((right.psi - left.psi) / dv - 0.5 * (fl.psi + fr.psi)).norm(),
        area4: res(left.r, right.r, fl.r, fr.r),
        lapse4: res(left.ln_omega, right.ln_omega, fl.ln_omega, fr.ln_omega),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::minkowski_state;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Pulse-like state used by the reduction oracles below.
    pub(crate) fn fixture() -> PointState {
        PointState {
            u: -120.0,
            v: 0.4,
            r: 119.7,
            ln_omega: 0.03,
            trchi: 0.0162,
            trchib: -0.0171,
            omega: 0.0012,
            omegab: -0.0007,
            rho_f: 2.5e-4,
            ub: -1.1e-4,
            psi: c(0.012, -0.004),
            psi4: c(0.018, 0.025),
            psi3: c(-1.3e-4, 2.1e-4),
        }
    }

    #[test]
    fn vacuum_is_zero() {
        let s = minkowski_state(-10.0, 0.3).unwrap();
        assert_eq!(matter_components(&s, 0.1), MatterComponents::default());
    }

    #[test]
    fn single_outgoing_component() {
        let mut s = minkowski_state(-10.0, 0.0).unwrap();
        s.psi4 = c(0.7, 0.0);
        let m = matter_components(&s, 0.1);
        assert!((m.s44 - 2.0 * 0.49).abs() < 1e-15);
        assert_eq!((m.s33, m.s34, m.rscal), (0.0, 0.0, 0.0));
    }

    // Oracle: Ricci and Schouten written out in full as 4x4 frame matrices
    // (index order 3, 4, A=1, A=2) and contracted with the frame inverse metric.
    fn schouten_oracle(psi3: Complex64, psi4: Complex64, rho_f: f64) -> [f64; 6] {
        let mut ric = [[0.0f64; 4]; 4];
        ric[0][0] = 2.0 * psi3.norm_sqr();
        ric[1][1] = 2.0 * psi4.norm_sqr();
        let x = 2.0 * (psi3 * psi4.conj()).re + 2.0 * rho_f * rho_f;
        ric[0][1] = x;
        ric[1][0] = x;
        ric[2][2] = rho_f * rho_f;
        ric[3][3] = rho_f * rho_f;
        let mut g = [[0.0f64; 4]; 4];
        g[0][1] = -2.0;
        g[1][0] = -2.0;
        g[2][2] = 1.0;
        g[3][3] = 1.0;
        let mut ginv = [[0.0f64; 4]; 4];
        ginv[0][1] = -0.5;
        ginv[1][0] = -0.5;
        ginv[2][2] = 1.0;
        ginv[3][3] = 1.0;
        let mut r = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                r += ginv[a][b] * ric[a][b];
            }
        }
        let mut s = [[0.0f64; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                s[a][b] = ric[a][b] - g[a][b] * r / 6.0;
            }
        }
        let mut tr = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                tr += ginv[a][b] * s[a][b];
            }
        }
        [s[1][1], s[0][0], s[0][1], s[2][2] + s[3][3], tr, r]
    }

    #[test]
    fn schouten_matches_matrix_oracle() {
        let mut s = minkowski_state(-10.0, 0.0).unwrap();
        s.psi3 = c(1.0, 0.0);
        s.psi4 = c(1.0, 0.0);
        s.rho_f = 1.0;
        let m = matter_components(&s, 0.1);
        let o = schouten_oracle(s.psi3, s.psi4, s.rho_f);
        let got = [m.s44, m.s33, m.s34, m.tr_ssl, m.tr_s, m.rscal];
        for (g, w) in got.iter().zip(o) {
            assert!((g - w).abs() < 1e-12, "{got:?} vs {o:?}");
        }
        // Ψ3 = Ψ4 = ρ_F = 1: R = -2, S34 = 4 - 2/3, trS̸ = 2 + 2/3, TrS = -2/3.
        assert!((m.s34 - 10.0 / 3.0).abs() < 1e-12);
        assert!((m.tr_ssl - 8.0 / 3.0).abs() < 1e-12);
        assert!((m.tr_s + 2.0 / 3.0).abs() < 1e-12);
        let f = fixture();
        let m = matter_components(&f, 0.1);
        let o = schouten_oracle(f.psi3, f.psi4, f.rho_f);
        for (g, w) in [m.s44, m.s33, m.s34, m.tr_ssl, m.tr_s, m.rscal].iter().zip(o) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_examples() {
        let s = minkowski_state(-7.0, 0.5).unwrap();
        assert!(gauss_rho(&s, &matter_components(&s, 0.0)).abs() < 1e-16);
        let (r, mass) = (5.0f64, 0.8);
        let mut s = minkowski_state(-5.0, 0.0).unwrap();
        let k = (1.0 - 2.0 * mass / r).sqrt();
        s.trchi = 2.0 * k / r;
        s.trchib = -2.0 * k / r;
        let rho = gauss_rho(&s, &MatterComponents::default());
        assert!((rho + 2.0 * mass / r.powi(3)).abs() < 1e-15);
        let mut s = minkowski_state(-1.0, 0.0).unwrap();
        s.trchi = 0.0;
        s.trchib = 0.0;
        assert_eq!(gauss_rho(&s, &MatterComponents::default()), -1.0);
    }

    #[test]
    fn minkowski_rhs_u_matches_exact_derivatives() {
        for (u, v) in [(-160.0, 0.0), (-10.0, 1.0), (-33.3, 0.71)] {
            let s = minkowski_state(u, v).unwrap();
            let m = matter_components(&s, 0.01);
            let d = rhs_u(&s, &m, gauss_rho(&s, &m), 0.01);
            let r = v - u;
            assert!((d.trchib + 2.0 / (r * r)).abs() < 1e-15);
            assert!((d.trchi - 2.0 / (r * r)).abs() < 1e-15);
            assert_eq!(d.r, -1.0);
            assert!(d.omega.abs() < 1e-16);
            assert_eq!((d.rho_f, d.ln_omega), (0.0, 0.0));
            assert_eq!((d.psi, d.psi4), (Complex64::default(), Complex64::default()));
            let dv = rhs_v(&s, &m, gauss_rho(&s, &m), 0.01);
            assert!(dv.omegab.abs() < 1e-16);
            assert_eq!((dv.ub, dv.psi3), (0.0, Complex64::default()));
        }
    }

    #[test]
    fn ub_example() {
        let mut s = minkowski_state(-10.0, 0.0).unwrap();
        s.rho_f = 0.1;
        let m = matter_components(&s, 0.01);
        let d = rhs_v(&s, &m, gauss_rho(&s, &m), 0.01);
        assert!((d.ub + 0.2).abs() < 1e-15);
    }

    // Oracle: the ∇3/∇4 equations with every tensorial term kept as an
    // explicit zero, evaluated term by term and multiplied by Ω afterwards.
    #[test]
    fn rhs_matches_reduction_oracle() {
        let s = fixture();
        let e = 0.05;
        let m = matter_components(&s, e);
        let rho = gauss_rho(&s, &m);
        let d = rhs_u(&s, &m, rho, e);
        let om = s.ln_omega.exp();
        let (chibh2, div_bf, div_psisl, eta_psisl, chibh_psisl) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let chib_chih = 0.0;
        let n3_trchib = -0.5 * s.trchib.powi(2) - chibh2 - 2.0 * s.omegab * s.trchib - m.s33;
        let n3_trchi = -0.5 * s.trchib * s.trchi + 2.0 * s.omegab * s.trchi + 2.0 * rho - chib_chih + m.tr_s;
        let n3_omega = 2.0 * s.omega * s.omegab + 0.5 * rho + 0.25 * (m.tr_ssl - m.tr_s);
        let n3_rhof = -s.trchib * s.rho_f - div_bf - 2.0 * e * (s.psi * s.psi3.conj()).im;
        let iu = Complex64::new(0.0, e * s.ub);
        let n3_psi4 = -0.5 * s.trchib * s.psi4 + 2.0 * s.omegab * s.psi4 - iu * s.psi4 - 0.5 * s.trchi * s.psi3
            + Complex64::new(0.0, e * s.rho_f) * s.psi
            + div_psisl
            + eta_psisl
            + chibh_psisl;
        let n3_psi = s.psi3 - iu * s.psi;
        let want = [
            om * n3_trchib,
            om * n3_trchi,
            om * n3_omega,
            om * n3_rhof,
            om * n3_psi4.re,
            om * n3_psi4.im,
            om * n3_psi.re,
            om * n3_psi.im,
            0.5 * om * s.trchib * s.r,
            -2.0 * om * s.omegab,
        ];
        let got = [d.trchib, d.trchi, d.omega, d.rho_f, d.psi4.re, d.psi4.im, d.psi.re, d.psi.im, d.r, d.ln_omega];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= 1e-12 * w.abs().max(1e-6), "{g} vs {w}");
        }
        let dv = rhs_v(&s, &m, rho, e);
        let n4_omegab = 2.0 * s.omega * s.omegab + 0.5 * rho + 0.25 * (m.tr_ssl - m.tr_s);
        let n4_ub = 2.0 * (-s.rho_f + s.omega * s.ub);
        let n4_psi3 = -0.5 * s.trchi * s.psi3 + 2.0 * s.omega * s.psi3
            - 0.5 * s.trchib * s.psi4
            - Complex64::new(0.0, e * s.rho_f) * s.psi;
        let want = [om * n4_omegab, om * n4_ub, om * n4_psi3.re, om * n4_psi3.im];
        let got = [dv.omegab, dv.ub, dv.psi3.re, dv.psi3.im];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= 1e-12 * w.abs().max(1e-6), "{g} vs {w}");
        }
    }

    // Im(ψ·conj(ψ)/(Ω|u|)) = 0, so the two sources agree up to rounding.
    #[test]
    fn tilde_source_switch_is_equivalent() {
        let s = fixture();
        let m = matter_components(&s, 0.05);
        let rho = gauss_rho(&s, &m);
        let a = rhs_u_with(&s, &m, rho, 0.05, RhoFSource::Psi3);
        let b = rhs_u_with(&s, &m, rho, 0.05, RhoFSource::Psi3Tilde);
        assert!((a.rho_f - b.rho_f).abs() <= 1e-15 * a.rho_f.abs());
        let want = s.big_omega() * (-s.trchib * s.rho_f - 0.1 * (s.psi * psi3_tilde(&s).conj()).im);
        assert!((b.rho_f - want).abs() < 1e-18);
        assert_eq!(a.trchi, b.trchi);
    }

    #[test]
    fn minkowski_neighbours_have_small_residuals() {
        let dv = 0.01;
        let l = minkowski_state(-10.0, 0.5).unwrap();
        let r = minkowski_state(-10.0, 0.5 + dv).unwrap();
        let res = constraint_residuals(&l, &r, dv, 0.01);
        // field scale 1/r², second order in Δv
        assert!(res.max_abs() <= 10.0 * dv * dv / 100.0, "{res:?}");
    }

    #[test]
    fn psi_link_defect_is_reported() {
        let dv = 0.01;
        let mut l = minkowski_state(-10.0, 0.5).unwrap();
        let mut r = minkowski_state(-10.0, 0.5 + dv).unwrap();
        l.psi = c(0.1, 0.0);
        r.psi = c(0.1 + 0.02 * dv, 0.0);
        l.psi4 = c(0.02 - 0.003, 0.0);
        r.psi4 = c(0.02 - 0.003, 0.0);
        let res = constraint_residuals(&l, &r, dv, 0.01);
        assert!((res.psi_link - 0.003).abs() < 1e-9);
    }
}
