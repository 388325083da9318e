//! `solution.csv`: one row per grid point, cones in increasing u, points in increasing v.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{charge, hawking_mass};
use crate::error::{Error, Result};
use crate::evolve::{cone_residuals, Solution};
use crate::grid::make_grid;
use crate::matter::{gauss_rho, matter_components};

pub const CSV_SCHEMA: &str = "emcsf-solution-csv v1";

pub const CSV_COLUMNS: [&str; 22] = [
    "u",
    "v",
    "r",
    "lnOmega",
    "trchi",
    "trchib",
    "omega",
    "omegab",
    "rhoF",
    "Ub",
    "psi_re",
    "psi_im",
    "Psi4_re",
    "Psi4_im",
    "Psi3_re",
    "Psi3_im",
    "rho",
    "Q",
    "m",
    "res_ray4",
    "res_cross4",
    "res_maxwell4",
];

/// One CSV row. The residual columns hold the residual of the v-interval ending
/// at this point, and zero on the first point of each cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub u: f64,
    pub v: f64,
    pub r: f64,
    #[serde(rename = "lnOmega")]
    pub ln_omega: f64,
    pub trchi: f64,
    pub trchib: f64,
    pub omega: f64,
    pub omegab: f64,
    #[serde(rename = "rhoF")]
    pub rho_f: f64,
    #[serde(rename = "Ub")]
    pub ub: f64,
    pub psi_re: f64,
    pub psi_im: f64,
    #[serde(rename = "Psi4_re")]
    pub psi4_re: f64,
    #[serde(rename = "Psi4_im")]
    pub psi4_im: f64,
    #[serde(rename = "Psi3_re")]
    pub psi3_re: f64,
    #[serde(rename = "Psi3_im")]
    pub psi3_im: f64,
    pub rho: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub m: f64,
    pub res_ray4: f64,
    pub res_cross4: f64,
    pub res_maxwell4: f64,
}

pub fn solution_rows(sol: &Solution) -> Result<Vec<SolutionRow>> {
    let params = sol.params();
    let dv = make_grid(params)?.dv;
    let mut rows = Vec::with_capacity(sol.cones.len() * sol.cones[0].points.len());
    for cone in &sol.cones {
        let res = cone_residuals(&cone.points, dv, params.coupling);
        for (j, p) in cone.points.iter().enumerate() {
            let mc = matter_components(p, params.coupling);
            let r = if j == 0 { Default::default() } else { res[j - 1] };
            rows.push(SolutionRow {
                u: p.u,
                v: p.v,
                r: p.r,
                ln_omega: p.ln_omega,
                trchi: p.trchi,
                trchib: p.trchib,
                omega: p.omega,
                omegab: p.omegab,
                rho_f: p.rho_f,
                ub: p.ub,
                psi_re: p.psi.re,
                psi_im: p.psi.im,
                psi4_re: p.psi4.re,
                psi4_im: p.psi4.im,
                psi3_re: p.psi3.re,
                psi3_im: p.psi3.im,
                rho: gauss_rho(p, &mc),
                q: charge(p),
                m: hawking_mass(p),
                res_ray4: r.ray4,
                res_cross4: r.cross4,
                res_maxwell4: r.maxwell4,
            });
        }
    }
    Ok(rows)
}

/// Writes the schema line followed by the header and all rows.
pub fn write_csv<W: Write>(sol: &Solution, mut out: W) -> Result<()> {
    writeln!(out, "# schema: {CSV_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in solution_rows(sol)? {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(sol: &Solution, path: impl AsRef<Path>) -> Result<()> {
    write_csv(sol, BufWriter::new(File::create(path)?))
}

/// Reads rows back, rejecting a missing or different schema line or header.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SolutionRow>> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    match first.trim_end().strip_prefix("# schema: ") {
        Some(s) if s == CSV_SCHEMA => {}
        Some(s) => return Err(Error::Schema(format!("unsupported schema {s:?}"))),
        None => return Err(Error::Schema("missing schema line".into())),
    }
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Schema(format!("unexpected columns {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Vec<SolutionRow>> {
    read_csv(File::open(path)?)
}
