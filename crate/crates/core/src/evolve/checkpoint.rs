//! Binary checkpoint container.
//!
//! Layout (little endian): magic `EMCSFCK\0`, `u32` version, `u64` header length,
//! JSON header (`meta`, `nU`, `nV`), then for each cone `u`, `maxResidual` and
//! 16 `f64` per point (`u v r lnOmega trchi trchib omega omegab rhoF Ub` followed by
//! re/im of `psi Psi4 Psi3`), then 6 `f64` per residual-history entry and 5 per
//! diagnostics row, and the trailer `END\0`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DiagRow, RunMeta, Solution};
use crate::error::{Error, Result};
use crate::grid::{ConeData, PointState};
use crate::matter::Residuals;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"EMCSFCK\0";
const TRAILER: &[u8; 4] = b"END\0";

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Header {
    meta: RunMeta,
    n_cones: usize,
    n_points: usize,
}

fn point_values(p: &PointState) -> [f64; 16] {
    [
        p.u, p.v, p.r, p.ln_omega, p.trchi, p.trchib, p.omega, p.omegab, p.rho_f, p.ub, p.psi.re, p.psi.im, p.psi4.re,
        p.psi4.im, p.psi3.re, p.psi3.im,
    ]
}

fn point_from(x: &[f64]) -> PointState {
    PointState {
        u: x[0],
        v: x[1],
        r: x[2],
        ln_omega: x[3],
        trchi: x[4],
        trchib: x[5],
        omega: x[6],
        omegab: x[7],
        rho_f: x[8],
        ub: x[9],
        psi: Complex64::new(x[10], x[11]),
        psi4: Complex64::new(x[12], x[13]),
        psi3: Complex64::new(x[14], x[15]),
    }
}

/// Serializes the solution to bytes.
pub fn encode(sol: &Solution) -> Result<Vec<u8>> {
    let n_points = sol.cones.first().map_or(0, |c| c.points.len());
    let header = serde_json::to_vec(&Header { meta: sol.meta.clone(), n_cones: sol.cones.len(), n_points })?;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u64).to_le_bytes());
    out.extend_from_slice(&header);
    let mut put = |x: f64| out.extend_from_slice(&x.to_le_bytes());
    for c in &sol.cones {
        if c.points.len() != n_points {
            return Err(Error::Schema("ragged cones".into()));
        }
        put(c.u);
        put(c.max_residual);
        for p in &c.points {
            point_values(p).into_iter().for_each(&mut put);
        }
    }
    for r in &sol.residual_history {
        r.as_array().into_iter().for_each(&mut put);
    }
    for d in &sol.diagnostics {
        [d.u, d.q_end, d.m_end, d.min_trchi, d.min_trchib].into_iter().for_each(&mut put);
    }
    out.extend_from_slice(TRAILER);
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Schema(format!("truncated checkpoint at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let b = self.take(8 * n)?;
        Ok(b.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

/// Parses bytes produced by [`encode`]; never returns a partial solution.
pub fn decode(buf: &[u8]) -> Result<Solution> {
    let mut rd = Reader { buf, pos: 0 };
    if rd.take(8)? != MAGIC {
        return Err(Error::Schema("bad magic".into()));
    }
    let version = u32::from_le_bytes(rd.take(4)?.try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(Error::UnsupportedVersion { found: version, expected: CHECKPOINT_VERSION });
    }
    let hlen = u64::from_le_bytes(rd.take(8)?.try_into().unwrap()) as usize;
    if hlen > buf.len() {
        return Err(Error::Schema("header length exceeds file size".into()));
    }
    let header: Header = serde_json::from_slice(rd.take(hlen)?).map_err(|e| Error::Schema(format!("header: {e}")))?;
    let mut cones = Vec::with_capacity(header.n_cones);
    for _ in 0..header.n_cones {
        let x = rd.f64s(2 + 16 * header.n_points)?;
        let points = x[2..].chunks_exact(16).map(point_from).collect();
        cones.push(ConeData { u: x[0], points, max_residual: x[1] });
    }
    let residual_history = rd
        .f64s(6 * header.n_cones)?
        .chunks_exact(6)
        .map(|r| Residuals { ray4: r[0], cross4: r[1], maxwell4: r[2], psi_link: r[3], area4: r[4], lapse4: r[5] })
        .collect();
    let diagnostics = rd
        .f64s(5 * header.n_cones)?
        .chunks_exact(5)
        .map(|d| DiagRow { u: d[0], q_end: d[1], m_end: d[2], min_trchi: d[3], min_trchib: d[4] })
        .collect();
    if rd.take(4)? != TRAILER || rd.pos != buf.len() {
        return Err(Error::Schema("missing or misplaced trailer".into()));
    }
    Ok(Solution { cones, residual_history, diagnostics, meta: header.meta })
}

pub fn checkpoint(sol: &Solution, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(sol)?)?;
    Ok(())
}

pub fn restore(path: impl AsRef<Path>) -> Result<Solution> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chardata::{calibrate_pulse, PulseShape};
    use crate::evolve::run;
    use crate::grid::RunParams;

    fn sol() -> Solution {
        let mut p = RunParams { n_u: 12, n_v: 16, ..RunParams::default() };
        p.pulse = calibrate_pulse(&PulseShape::default(), &p).unwrap();
        run(&p).unwrap()
    }

    #[test]
    fn round_trip_bit_exact() {
        let s = sol();
        let back = decode(&encode(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn every_truncation_is_schema_error() {
        let bytes = encode(&sol()).unwrap();
        for cut in [0, 5, 12, 20, 300, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(decode(&bytes[..cut]), Err(Error::Schema(_))), "cut {cut}");
        }
    }

    #[test]
    fn version_bump_is_rejected() {
        let mut bytes = encode(&sol()).unwrap();
        bytes[8..12].copy_from_slice(&2u32.to_le_bytes());
        let e = decode(&bytes).unwrap_err();
        assert!(e.to_string().contains("unsupported version"));
    }
}
