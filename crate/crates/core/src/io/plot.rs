//! Static plots: SVG line charts and a PNG heat map of the outgoing expansion.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};

use crate::diagnostics::sphere_diag;
use crate::error::{Error, Result};
use crate::evolve::Solution;

/// Which plots to emit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotSelection {
    /// Fields (names from `PointState::fields`) plotted against v.
    pub fields: Vec<String>,
    /// Cone indices at which the profiles are taken; empty means first, middle and last.
    pub cones: Vec<usize>,
    /// Q(u,1) and m(u,1) against u.
    pub diagnostics: bool,
    pub heatmap: bool,
}

impl PlotSelection {
    pub fn none() -> Self {
        PlotSelection::default()
    }

    pub fn standard() -> Self {
        PlotSelection {
            fields: ["r", "trchi", "trchib", "rhoF", "psi_re", "psi_im"].map(String::from).to_vec(),
            cones: Vec::new(),
            diagnostics: true,
            heatmap: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty() && !self.diagnostics && !self.heatmap
    }
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite()) {
        b = (b.0.min(*x), b.1.max(*x), b.2.min(*y), b.3.max(*y));
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if b.1 == b.0 {
        b.1 = b.0 + 1.0;
    }
    if b.3 == b.2 {
        let pad = if b.2 == 0.0 { 1.0 } else { 0.05 * b.2.abs() };
        (b.2, b.3) = (b.2 - pad, b.3 + pad);
    }
    b
}

/// A line chart with labelled axis extremes and a legend.
pub fn line_chart_svg(title: &str, xlabel: &str, series: &[Series]) -> String {
    let (w, h, ml, mr, mt, mb) = (640.0, 400.0, 80.0, 150.0, 40.0, 50.0);
    let (x0, x1, y0, y1) = bounds(series);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - ml - mr,
        h - mt - mb
    );
    let _ = writeln!(s, r#"<text x="{ml}" y="{}" text-anchor="start">{}</text>"#, h - mb + 16.0, fmt_num(x0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, w - mr, h - mb + 16.0, fmt_num(x1));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        px((x0 + x1) / 2.0),
        h - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, ml - 6.0, h - mb, fmt_num(y0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, ml - 6.0, mt + 10.0, fmt_num(y1));
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ =
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = mt + 16.0 * k as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            w - mr + 10.0,
            w - mr + 30.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, w - mr + 35.0, ly + 4.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e4) {
        format!("{x:.3e}")
    } else {
        format!("{x:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `Ω⁻¹trχ` and the trapped flag at every grid point, indexed `[cone][point]`.
pub fn expansion_grid(sol: &Solution) -> Vec<Vec<(f64, bool)>> {
    let a = sol.params().a;
    sol.cones
        .iter()
        .map(|c| {
            c.points
                .iter()
                .map(|p| {
                    let d = sphere_diag(p, a);
                    (d.exp_out, d.trapped)
                })
                .collect()
        })
        .collect()
}

/// Heat map with u increasing downward and v to the right. Positive expansion
/// is blue, negative red, trapped points are hatched in grey.
pub fn heatmap_image(sol: &Solution) -> RgbImage {
    let g = expansion_grid(sol);
    let (nu, nv) = (g.len(), g[0].len());
    let scale = (400 / nu.max(nv)).max(1) as u32;
    let vmax = g.iter().flatten().fold(0.0f64, |m, (x, _)| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut img = RgbImage::new(nv as u32 * scale, nu as u32 * scale);
    for (px, py, pixel) in img.enumerate_pixels_mut() {
        let (i, j) = ((py / scale) as usize, (px / scale) as usize);
        let (x, trapped) = g[i][j];
        let t = (x.abs() / vmax).sqrt();
        let fade = (255.0 * (1.0 - t)) as u8;
        let mut c = if x > 0.0 { Rgb([fade, fade, 255]) } else { Rgb([255, fade, fade]) };
        if trapped && (px + py) % 4 < 2 {
            c = Rgb([96, 96, 96]);
        }
        *pixel = c;
    }
    img
}

/// Writes the selected plots into `dir` and returns the paths. An empty
/// selection touches nothing.
pub fn emit_plots(sol: &Solution, which: &PlotSelection, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    if which.is_empty() {
        return Ok(out);
    }
    fs::create_dir_all(dir)?;
    let n = sol.cones.len();
    let cones = if which.cones.is_empty() { vec![0, n / 2, n - 1] } else { which.cones.clone() };
    if let Some(&bad) = cones.iter().find(|&&i| i >= n) {
        return Err(Error::Config(format!("plot cone index {bad} out of range (0..{n})")));
    }
    for field in &which.fields {
        let k = sol.cones[0].points[0]
            .fields()
            .iter()
            .position(|f| f.0 == field)
            .ok_or_else(|| Error::UnknownSymbol(field.clone()))?;
        let series: Vec<Series> = cones
            .iter()
            .map(|&i| Series {
                label: format!("u = {}", fmt_num(sol.cones[i].u)),
                points: sol.cones[i].points.iter().map(|p| (p.v, p.fields()[k].1)).collect(),
            })
            .collect();
        let path = dir.join(format!("profile_{field}.svg"));
        fs::write(&path, line_chart_svg(field, "v", &series))?;
        out.push(path);
    }
    if which.diagnostics {
        for (name, f) in [("Q", 0usize), ("m", 1)] {
            let pts = sol.diagnostics.iter().map(|d| (d.u, if f == 0 { d.q_end } else { d.m_end })).collect();
            let path = dir.join(format!("diag_{name}.svg"));
            let series = [Series { label: format!("{name}(u, v_max)"), points: pts }];
            fs::write(&path, line_chart_svg(&format!("{name} on the last sphere of each cone"), "u", &series))?;
            out.push(path);
        }
    }
    if which.heatmap {
        let path = dir.join("expansion_heatmap.png");
        heatmap_image(sol).save(&path).map_err(|e| Error::Image(e.to_string()))?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chardata::PulseShape;
    use crate::evolve::run;
    use crate::grid::RunParams;

    fn vacuum() -> Solution {
        run(&RunParams { n_u: 10, n_v: 10, pulse: PulseShape::vacuum(), ..RunParams::default() }).unwrap()
    }

    #[test]
    fn empty_selection_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("plots");
        assert!(emit_plots(&vacuum(), &PlotSelection::none(), &target).unwrap().is_empty());
        assert!(!target.exists());
    }

    #[test]
    fn minkowski_expansion_is_positive() {
        let sol = vacuum();
        assert!(expansion_grid(&sol).iter().flatten().all(|(x, t)| *x > 0.0 && !*t));
        let img = heatmap_image(&sol);
        assert!(img.pixels().all(|p| p.0[2] == 255));
    }

    #[test]
    fn standard_selection_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plots(&vacuum(), &PlotSelection::standard(), dir.path()).unwrap();
        assert_eq!(files.len(), 6 + 2 + 1);
        for f in &files {
            assert!(fs::metadata(f).unwrap().len() > 0);
        }
        let svg = fs::read_to_string(dir.path().join("profile_r.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
        let png = image::open(dir.path().join("expansion_heatmap.png")).unwrap();
        assert!(png.width() >= 11);
    }

    #[test]
    fn unknown_field_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let sel = PlotSelection { fields: vec!["nope".into()], ..PlotSelection::none() };
        assert!(emit_plots(&vacuum(), &sel, dir.path()).is_err());
    }
}
