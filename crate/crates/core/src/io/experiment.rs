//! Experiment presets. Each preset runs its solutions, writes `solution.csv`,
//! optional plots and `summary.json`, and records pass/fail assertions.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::{ExperimentConfig, ExperimentKind};
use super::convergence::{convergence_study, truncation_estimate};
use super::plot::{emit_plots, PlotSelection};
use super::summary::{RunRecord, Summary};
use super::table::write_csv_file;
use crate::chardata::calibrate_pulse;
use crate::diagnostics::{charge, charge_flux, fit_decay, hawking_mass, linear_fit, sphere_diag, DECAY_SYMBOLS};
use crate::error::Result;
use crate::evolve::{run, run_many, IntegratorSettings, Solution};
use crate::grid::RunParams;
use crate::rescale::{covariance_runs, is_dyadic, rescaled_params};
use crate::sigcalc::{mutation_suite, Corpus, Registry};

/// Thresholds used by the preset assertions.
pub mod criteria {
    pub const MINKOWSKI_MAX_ERROR: f64 = 1e-6;
    pub const MINKOWSKI_RUNTIME_S: f64 = 10.0;
    pub const ORDER_MIN: f64 = 1.7;
    pub const ORDER_MAX: f64 = 2.3;
    pub const RESIDUAL_RATIO_MIN: f64 = 3.3;
    pub const RESIDUAL_RATIO_MAX: f64 = 4.8;
    /// Relative tolerance on the `-4/a` expansion bound (upper side only).
    pub const TRAP_BOUND_TOL: f64 = 0.5;
    pub const RUN_RUNTIME_S: f64 = 120.0;
    pub const CHARGE_IDENTITY_FACTOR: f64 = 10.0;
    /// Frozen constant `C` of the charge ceiling `Q(u∞,1) ≤ C 𝔢 a`.
    pub const CHARGE_CEILING: f64 = 0.18;
    pub const MASS_EXPONENT: f64 = 1.0;
    pub const MASS_EXPONENT_TOL: f64 = 0.15;
    pub const COVARIANCE_FACTOR: f64 = 3.0;
    /// `(symbol, exponent, tolerance)` for the decay fits.
    pub const DECAY_TARGETS: [(&str, f64, f64); 3] = [("psi", -1.0, 0.3), ("rhoF", -2.0, 0.3), ("Psi3t", -3.0, 0.5)];
    pub const SIGLINT_RUNTIME_S: f64 = 1.0;
    pub const BIANCHI_PAIRS: usize = 8;
}

use criteria::*;

/// Result of [`run_experiment`]: the summary and every file written.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub summary: Summary,
    pub artifacts: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.summary.passed()
    }

    /// Names of the failed assertions.
    pub fn failures(&self) -> Vec<String> {
        self.summary.failures().iter().map(|a| a.name.clone()).collect()
    }
}

/// Calibrates the pulse when requested (zero-amplitude data is left alone).
pub fn prepared_params(cfg: &ExperimentConfig) -> Result<RunParams> {
    let mut p = cfg.params.clone();
    if cfg.calibrate && p.pulse.amp > 0.0 {
        p.pulse = calibrate_pulse(&p.pulse, &p)?;
    }
    Ok(p)
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    summary: Summary,
    artifacts: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn write_run(&mut self, sol: &Solution, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let csv = dir.join("solution.csv");
        write_csv_file(sol, &csv)?;
        self.artifacts.push(csv);
        let sel = if self.cfg.plot { PlotSelection::standard() } else { PlotSelection::none() };
        self.artifacts.extend(emit_plots(sol, &sel, &dir.join("plots"))?);
        Ok(())
    }
}

/// Runs the preset named by `cfg.kind`. `Err` means the experiment could not be run;
/// failed assertions are reported through [`ExperimentOutcome::passed`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;
    let t0 = Instant::now();
    let mut ctx = Ctx { cfg, summary: Summary::new(cfg), artifacts: Vec::new() };
    match cfg.kind {
        ExperimentKind::Minkowski => minkowski(&mut ctx)?,
        ExperimentKind::Trapped => trapped(&mut ctx)?,
        ExperimentKind::Charging => charging(&mut ctx)?,
        ExperimentKind::Scaling => scaling(&mut ctx)?,
        ExperimentKind::Convergence => convergence(&mut ctx)?,
        ExperimentKind::Decay => decay(&mut ctx)?,
        ExperimentKind::Siglint => siglint(&mut ctx)?,
        ExperimentKind::Sweep => sweep(&mut ctx)?,
    }
    ctx.summary.wall_clock_s = t0.elapsed().as_secs_f64();
    let path = cfg.out_dir.join("summary.json");
    ctx.summary.write(&path)?;
    ctx.artifacts.push(path);
    Ok(ExperimentOutcome { summary: ctx.summary, artifacts: ctx.artifacts })
}

/// Largest deviation from the flat solution over the rectangle, per quantity.
pub fn minkowski_errors(sol: &Solution) -> [(&'static str, f64); 5] {
    let mut e = [("trchi", 0.0f64), ("trchib", 0.0), ("m", 0.0), ("Q", 0.0), ("psi", 0.0)];
    for p in sol.cones.iter().flat_map(|c| &c.points) {
        let r = p.r;
        let d = [
            (p.trchi - 2.0 / r).abs(),
            (p.trchib + 2.0 / r).abs(),
            hawking_mass(p).abs(),
            charge(p).abs(),
            p.psi.norm(),
        ];
        for (slot, x) in e.iter_mut().zip(d) {
            slot.1 = slot.1.max(x);
        }
    }
    e
}

fn minkowski(ctx: &mut Ctx) -> Result<()> {
    let p = prepared_params(ctx.cfg)?;
    let sol = run(&p)?;
    let errs = minkowski_errors(&sol);
    for (k, x) in errs {
        ctx.summary.measure(format!("minkowski.error.{k}"), x);
    }
    let max = errs.iter().fold(0.0f64, |m, e| m.max(e.1));
    let s = &mut ctx.summary;
    s.assert(
        "minkowski.maxError",
        "max |trchi-2/r|, |trchib+2/r|, |m|, |Q|, |psi| over the rectangle",
        max,
        format!("<= {MINKOWSKI_MAX_ERROR:e}"),
        max <= MINKOWSKI_MAX_ERROR,
    );
    let t = sol.meta.wall_clock_s;
    s.assert(
        "minkowski.runtimeS",
        "evolution wall clock",
        t,
        format!("<= {MINKOWSKI_RUNTIME_S}"),
        t <= MINKOWSKI_RUNTIME_S,
    );
    s.runs.push(RunRecord::of(&sol));
    let dir = ctx.cfg.out_dir.clone();
    ctx.write_run(&sol, &dir)
}

/// Initial-cone checks: the expansion floor `1/|u∞|` and no trapped spheres on either initial cone.
fn initial_cone_assertions(s: &mut Summary, prefix: &str, sol: &Solution) {
    let a = sol.params().a;
    let floor = 1.0 / sol.params().u_inf().abs();
    let min_exp = sol.cones[0].points.iter().map(|p| sphere_diag(p, a).exp_out).fold(f64::INFINITY, f64::min);
    s.assert(
        &format!("{prefix}.initialExpansionMin"),
        "min over v of Omega^-1 trchi on the initial outgoing cone",
        min_exp,
        format!(">= 1/|u_inf| = {floor}"),
        min_exp >= floor,
    );
    let rec = RunRecord::of(sol);
    let flags = (rec.trapped_locus.initial_outgoing_trapped + rec.trapped_locus.initial_incoming_trapped) as f64;
    s.assert(
        &format!("{prefix}.initialTrapped"),
        "trapped spheres on the initial cones",
        flags,
        "= 0".into(),
        flags == 0.0,
    );
}

/// Trapping at the last sphere `(−a/4, 1)`, with the expansion bound read one-sidedly.
fn trapping_assertions(s: &mut Summary, prefix: &str, sol: &Solution) {
    let a = sol.params().a;
    let d = sphere_diag(sol.final_cone().points.last().expect("non-empty cone"), a);
    let bound = -4.0 / a * (1.0 - TRAP_BOUND_TOL);
    s.assert(
        &format!("{prefix}.finalTrapped"),
        "trapped flag at (-a/4, 1)",
        f64::from(u8::from(d.trapped)),
        "= 1".into(),
        d.trapped,
    );
    s.assert(
        &format!("{prefix}.finalExpOut"),
        "Omega^-1 trchi at (-a/4, 1)",
        d.exp_out,
        format!("<= -4/a (1 - {TRAP_BOUND_TOL}) = {bound}"),
        d.exp_out <= bound,
    );
    s.measure(format!("{prefix}.finalExpOutOverBound"), d.exp_out / (-4.0 / a));
    s.assert(&format!("{prefix}.finalExpIn"), "Omega trchib at (-a/4, 1)", d.exp_in, "< 0".into(), d.exp_in < 0.0);
    let t = sol.meta.wall_clock_s;
    s.assert(
        &format!("{prefix}.runtimeS"),
        "evolution wall clock",
        t,
        format!("<= {RUN_RUNTIME_S}"),
        t <= RUN_RUNTIME_S,
    );
}

fn trapped(ctx: &mut Ctx) -> Result<()> {
    let p = prepared_params(ctx.cfg)?;
    let sol = run(&p)?;
    initial_cone_assertions(&mut ctx.summary, "trapped", &sol);
    trapping_assertions(&mut ctx.summary, "trapped", &sol);
    ctx.summary.runs.push(RunRecord::of(&sol));
    let dir = ctx.cfg.out_dir.clone();
    ctx.write_run(&sol, &dir)
}

/// Per-cone `(Q(u,1) − Q(u,0), flux integral)`.
fn charge_balance(sol: &Solution) -> Vec<(f64, f64)> {
    let e = sol.params().coupling;
    sol.cones.iter().map(|c| (charge(c.points.last().unwrap()) - charge(&c.points[0]), charge_flux(c, e))).collect()
}

/// Worst ratio of the charge-identity defect to its truncation scale
/// `τ(u) = |L_N − L_2N| + |I_N − I_2N|`, over the coarse cones.
pub fn charge_identity_ratio(coarse: &Solution, fine: &Solution) -> f64 {
    let bc = charge_balance(coarse);
    let bf = charge_balance(fine);
    let stride = (fine.cones.len() - 1) / (coarse.cones.len() - 1);
    bc.iter()
        .enumerate()
        .map(|(i, &(l, f))| {
            let (lf, ff) = bf[i * stride];
            let tau = (l - lf).abs() + (f - ff).abs();
            let defect = (l - f).abs();
            if defect == 0.0 {
                0.0
            } else {
                defect / tau
            }
        })
        .fold(0.0, f64::max)
}

fn charging(ctx: &mut Ctx) -> Result<()> {
    let p = prepared_params(ctx.cfg)?;
    let fine_p = RunParams { n_u: 2 * p.n_u, n_v: 2 * p.n_v, ..p.clone() };
    let mut sols = run_many(&[p.clone(), fine_p], &IntegratorSettings::default()).into_iter();
    let sol = sols.next().unwrap()?;
    let fine = sols.next().unwrap()?;
    let q = charge(sol.cones[0].points.last().unwrap());
    let ea = p.coupling * p.a;
    let s = &mut ctx.summary;
    s.assert(
        "charging.qInitial",
        "Q(u_inf, 1)",
        q,
        format!(">= e a / 2pi = {}", ea / (2.0 * PI)),
        q >= ea / (2.0 * PI),
    );
    let ratio = charge_identity_ratio(&sol, &fine);
    s.assert(
        "charging.identityRatio",
        "max over cones of |Q(u,1)-Q(u,0)-flux| / truncation scale",
        ratio,
        format!("<= {CHARGE_IDENTITY_FACTOR}"),
        ratio <= CHARGE_IDENTITY_FACTOR,
    );
    s.assert(
        "charging.qOverEa",
        "Q(u_inf, 1) / (e a)",
        q / ea,
        format!("<= C = {CHARGE_CEILING}"),
        q / ea <= CHARGE_CEILING,
    );
    initial_cone_assertions(s, "charging", &sol);
    s.runs.push(RunRecord::of(&sol));
    let dir = ctx.cfg.out_dir.clone();
    ctx.write_run(&sol, &dir)
}

fn scaling(ctx: &mut Ctx) -> Result<()> {
    let p = prepared_params(ctx.cfg)?;
    let delta = ctx.cfg.delta.expect("validated");
    let (report, _scaled, b) = covariance_runs(&p, delta)?;
    let bp = rescaled_params(&p, delta)?;
    let b_fine = run(&RunParams { n_u: 2 * bp.n_u, n_v: 2 * bp.n_v, ..bp })?;
    let trunc = truncation_estimate(&b, &b_fine)?;
    let s = &mut ctx.summary;
    s.measure("scaling.delta", delta);
    s.measure("scaling.dyadic", f64::from(u8::from(is_dyadic(delta))));
    let mut worst = 0.0f64;
    for f in &report.fields {
        let t = trunc.iter().find(|(n, _)| *n == f.field).map_or(0.0, |x| x.1);
        s.measure(format!("scaling.discrepancy.{}", f.field), f.max);
        s.measure(format!("scaling.truncation.{}", f.field), t);
        let r = if f.max == 0.0 { 0.0 } else { f.max / t };
        worst = worst.max(r);
    }
    s.assert(
        "scaling.discrepancyRatio",
        "max over fields of discrepancy / branch-B truncation error",
        worst,
        format!("<= {COVARIANCE_FACTOR}"),
        worst <= COVARIANCE_FACTOR,
    );
    s.covariance = Some(report);
    s.runs.push(RunRecord::of(&b));
    let dir = ctx.cfg.out_dir.clone();
    ctx.write_run(&b, &dir)
}

fn convergence(ctx: &mut Ctx) -> Result<()> {
    let p = prepared_params(ctx.cfg)?;
    let (rep, sols) = convergence_study(&p, ctx.cfg.refinements + 1)?;
    let s = &mut ctx.summary;
    for f in &rep.fields {
        for (k, d) in f.diffs.iter().enumerate() {
            s.measure(format!("convergence.diff.{}.{k}", f.field), *d);
        }
        for (k, o) in f.orders.iter().enumerate() {
            s.assert(
                &format!("convergence.order.{}.{k}", f.field),
                "self-convergence order",
                *o,
                format!("in [{ORDER_MIN}, {ORDER_MAX}]"),
                within(*o, ORDER_MIN, ORDER_MAX),
            );
        }
    }
    for r in &rep.residuals {
        let asserted = ["ray4", "cross4", "maxwell4"].contains(&r.name.as_str());
        for (k, x) in r.ratios.iter().enumerate() {
            let key = format!("convergence.residualRatio.{}.{k}", r.name);
            if asserted {
                s.assert(
                    &key,
                    "constraint residual ratio per refinement",
                    *x,
                    format!("in [{RESIDUAL_RATIO_MIN}, {RESIDUAL_RATIO_MAX}]"),
                    within(*x, RESIDUAL_RATIO_MIN, RESIDUAL_RATIO_MAX),
                );
            } else {
                s.measure(key, *x);
            }
        }
    }
    s.convergence = Some(rep);
    for sol in &sols {
        s.runs.push(RunRecord::of(sol));
    }
    let dir = ctx.cfg.out_dir.clone();
    ctx.write_run(&sols[0], &dir)
}

fn decay(ctx: &mut Ctx) -> Result<()> {
    let p = prepared_params(ctx.cfg)?;
    let sol = run(&p)?;
    let v_star = ctx.cfg.v_star;
    let s = &mut ctx.summary;
    s.measure("decay.vStar", v_star);
    for sym in DECAY_SYMBOLS {
        let fit = fit_decay(&sol, sym, v_star)?;
        match DECAY_TARGETS.iter().find(|t| t.0 == sym) {
            Some(&(_, target, tol)) => {
                let x = fit.u_exponent.unwrap_or(f64::NAN);
                s.assert(
                    &format!("decay.uExponent.{sym}"),
                    "tail power-law exponent in |u|",
                    x,
                    format!("{target} +- {tol}"),
                    (x - target).abs() <= tol,
                );
            }
            None => {
                if let Some(x) = fit.u_exponent {
                    s.measure(format!("decay.uExponent.{sym}"), x);
                }
            }
        }
        s.fits.push(fit);
    }
    s.runs.push(RunRecord::of(&sol));
    let dir = ctx.cfg.out_dir.clone();
    ctx.write_run(&sol, &dir)
}

fn siglint(ctx: &mut Ctx) -> Result<()> {
    let t0 = Instant::now();
    let reg = Registry::standard();
    let corpus = Corpus::standard();
    let report = corpus.lint(&reg)?;
    let muts = mutation_suite(&reg, &corpus)?;
    let t = t0.elapsed().as_secs_f64();
    let s = &mut ctx.summary;
    let total = report.equations.len() as f64;
    let frac = report.equations.iter().filter(|e| e.report.pass).count() as f64 / total;
    s.measure("siglint.equations", total);
    s.assert(
        "siglint.passFraction",
        "fraction of corpus equations that are homogeneous",
        frac,
        "= 1".into(),
        frac == 1.0,
    );
    let pairs = report.pairs.iter().filter(|p| p.pass).count();
    s.assert(
        "siglint.bianchiPairs",
        "Bianchi pairs passing",
        pairs as f64,
        format!("= {BIANCHI_PAIRS}"),
        pairs == BIANCHI_PAIRS && report.pairs.len() == BIANCHI_PAIRS,
    );
    let detected = muts.iter().filter(|m| m.detected()).count();
    s.measure("siglint.mutations", muts.len() as f64);
    s.assert(
        "siglint.mutationsDetected",
        "single-entry mutations producing a failure",
        detected as f64,
        format!("= {}", muts.len()),
        detected == muts.len() && !muts.is_empty(),
    );
    s.assert(
        "siglint.runtimeS",
        "lint plus mutation suite",
        t,
        format!("<= {SIGLINT_RUNTIME_S}"),
        t <= SIGLINT_RUNTIME_S,
    );
    s.siglint = Some(serde_json::json!({ "report": report, "mutations": muts }));
    let path = ctx.cfg.out_dir.join("siglint.txt");
    fs::write(&path, report.to_string())?;
    ctx.artifacts.push(path);
    Ok(())
}

/// Index of the smallest `a` from which every larger swept value is trapped at `(−a/4, 1)`.
pub fn trapping_threshold(sols: &[Solution]) -> Option<usize> {
    let trapped: Vec<bool> =
        sols.iter().map(|s| sphere_diag(s.final_cone().points.last().unwrap(), s.params().a).trapped).collect();
    let k = trapped.iter().rposition(|t| !t).map_or(0, |k| k + 1);
    (k < sols.len()).then_some(k)
}

/// Least-squares exponent of `m(u∞, 1)` against `a`.
pub fn mass_exponent(sols: &[Solution]) -> f64 {
    let la: Vec<f64> = sols.iter().map(|s| s.params().a.ln()).collect();
    let lm: Vec<f64> = sols.iter().map(|s| hawking_mass(s.cones[0].points.last().unwrap()).ln()).collect();
    linear_fit(&la, &lm).0
}

fn sweep(ctx: &mut Ctx) -> Result<()> {
    let mut all = Vec::new();
    for &a in &ctx.cfg.sweep_a {
        let mut c = ctx.cfg.clone();
        c.params.a = a;
        all.push(prepared_params(&c)?);
    }
    let sols = run_many(&all, &IntegratorSettings::default()).into_iter().collect::<Result<Vec<_>>>()?;
    for sol in &sols {
        let a = sol.params().a;
        let rec = RunRecord::of(sol);
        let s = &mut ctx.summary;
        s.measure(format!("sweep.a{a}.mInitial"), rec.m_initial);
        s.measure(format!("sweep.a{a}.qInitial"), rec.q_initial);
        s.measure(format!("sweep.a{a}.finalExpOut"), rec.final_sphere.exp_out);
        s.measure(format!("sweep.a{a}.finalExpIn"), rec.final_sphere.exp_in);
        s.measure(format!("sweep.a{a}.runtimeS"), rec.wall_clock_s);
        s.runs.push(rec);
        let dir = ctx.cfg.out_dir.join(format!("a{a}"));
        ctx.write_run(sol, &dir)?;
    }
    let s = &mut ctx.summary;
    let worst_t = sols.iter().map(|x| x.meta.wall_clock_s).fold(0.0, f64::max);
    s.assert(
        "sweep.runtimeS",
        "slowest run wall clock",
        worst_t,
        format!("<= {RUN_RUNTIME_S}"),
        worst_t <= RUN_RUNTIME_S,
    );
    match trapping_threshold(&sols) {
        Some(k) => {
            s.measure("sweep.thresholdA", sols[k].params().a);
            trapping_assertions(s, "sweep.threshold", &sols[k]);
        }
        None => s.assert("sweep.thresholdA", "smallest a trapped from there on", f64::NAN, "exists".into(), false),
    }
    let q = mass_exponent(&sols);
    s.assert(
        "sweep.massExponent",
        "least-squares exponent of m(u_inf, 1) against a",
        q,
        format!("{MASS_EXPONENT} +- {MASS_EXPONENT_TOL}"),
        (q - MASS_EXPONENT).abs() <= MASS_EXPONENT_TOL,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ExperimentKind, dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind);
        c.out_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn minkowski_preset_passes_and_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(ExperimentKind::Minkowski, dir.path());
        c.set("n", "40").unwrap();
        let out = run_experiment(&c).unwrap();
        assert!(out.passed(), "{:?}", out.failures());
        assert!(out.summary.get("minkowski.maxError").unwrap() <= 1e-6);
        let back = Summary::read(dir.path().join("summary.json")).unwrap();
        assert_eq!(back.assertions.len(), 2);
        assert!(dir.path().join("solution.csv").exists());
        assert!(!dir.path().join("plots").exists());
    }

    #[test]
    fn nonzero_pulse_fails_the_minkowski_preset() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(ExperimentKind::Minkowski, dir.path());
        c.set("n", "20").unwrap();
        c.set("pulse-amp", "0.5").unwrap();
        let out = run_experiment(&c).unwrap();
        assert_eq!(out.failures(), vec!["minkowski.maxError".to_string()]);
    }

    #[test]
    fn siglint_preset_passes() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&cfg(ExperimentKind::Siglint, dir.path())).unwrap();
        assert!(out.passed(), "{:?}", out.failures());
        assert!(fs::read_to_string(dir.path().join("siglint.txt")).unwrap().contains("PASS"));
    }

    #[test]
    fn plots_are_written_when_requested() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(ExperimentKind::Trapped, dir.path());
        c.set("n", "40").unwrap();
        c.plot = true;
        let out = run_experiment(&c).unwrap();
        assert!(out.artifacts.iter().any(|p| p.ends_with("plots/expansion_heatmap.png")));
        let locus = &out.summary.runs[0].trapped_locus;
        assert!(locus.trapped_points > 0);
        assert_eq!(locus.initial_outgoing_trapped + locus.initial_incoming_trapped, 0);
    }

    #[test]
    fn threshold_index() {
        let mk = |amp: f64| {
            let p = RunParams { n_u: 20, n_v: 20, ..RunParams::default() };
            let p = RunParams { pulse: crate::chardata::PulseShape { amp, ..p.pulse }, ..p };
            run(&prepared_params(&ExperimentConfig { params: p, ..ExperimentConfig::new(ExperimentKind::Trapped) })
                .unwrap())
            .unwrap()
        };
        let trapped = mk(1.0);
        let flat =
            run(&RunParams { n_u: 20, n_v: 20, pulse: crate::chardata::PulseShape::vacuum(), ..RunParams::default() })
                .unwrap();
        assert_eq!(trapping_threshold(&[flat.clone(), trapped.clone()]), Some(1));
        assert_eq!(trapping_threshold(&[trapped.clone(), flat.clone()]), None);
        assert_eq!(trapping_threshold(&[trapped.clone(), trapped]), Some(0));
    }
}
