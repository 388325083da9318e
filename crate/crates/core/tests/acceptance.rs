//! Acceptance criteria, one PASS/FAIL line each. Every tolerance is pinned here.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use emcsf_core::chardata::{calibrate_pulse, ProfileKind, PulseShape};
use emcsf_core::diagnostics::{charge, fit_decay, hawking_mass, sphere_diag};
use emcsf_core::evolve::{checkpoint, restore, run, run_many, IntegratorSettings, Solution};
use emcsf_core::grid::RunParams;
use emcsf_core::io::convergence::{convergence_report, doubling_params, truncation_estimate};
use emcsf_core::io::experiment::{charge_identity_ratio, mass_exponent, minkowski_errors, trapping_threshold};
use emcsf_core::io::write_csv;
use emcsf_core::rescale::{covariance_runs, rescaled_params};
use emcsf_core::sigcalc::{mutation_suite, Corpus, Registry};

// C1
const FLAT_MAX_ERROR: f64 = 1e-6;
const FLAT_RUNTIME_S: f64 = 10.0;
// C2
const ORDER_LO: f64 = 1.7;
const ORDER_HI: f64 = 2.3;
const RATIO_LO: f64 = 3.3;
const RATIO_HI: f64 = 4.8;
// C4
const TRAP_TOL: f64 = 0.5;
const RUN_RUNTIME_S: f64 = 120.0;
// C5
const IDENTITY_FACTOR: f64 = 10.0;
const CHARGE_C: f64 = 0.18;
// C6
const MASS_EXP: f64 = 1.0;
const MASS_EXP_TOL: f64 = 0.15;
// C7
const COVARIANCE_FACTOR: f64 = 3.0;
const DELTA: f64 = 0.5;
// C8
const V_STAR: f64 = 0.25;
const DECAY: [(&str, f64, f64); 3] = [("psi", -1.0, 0.3), ("rhoF", -2.0, 0.3), ("Psi3t", -3.0, 0.5)];
// C9
const PAIRS: usize = 8;
const LINT_RUNTIME_S: f64 = 1.0;

fn calibrated(a: f64, n: usize) -> RunParams {
    let mut p = RunParams { a, n_u: n, n_v: n, ..RunParams::default() };
    let shape = PulseShape { profile_kind: ProfileKind::SmoothBump, ..PulseShape::default() };
    p.pulse = calibrate_pulse(&shape, &p).unwrap();
    p
}

fn all_ok(sols: Vec<emcsf_core::Result<Solution>>) -> Vec<Solution> {
    sols.into_iter().map(|s| s.unwrap()).collect()
}

struct Board {
    lines: Vec<(String, bool)>,
}

impl Board {
    fn record(&mut self, id: &str, pass: bool, detail: String) {
        let line = format!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((line, pass));
    }
}

fn c1(b: &mut Board) {
    let p = RunParams { pulse: PulseShape::vacuum(), ..RunParams::default() };
    assert_eq!((p.a, p.u_inf(), p.n_u, p.n_v), (40.0, -160.0, 200, 200));
    let t0 = Instant::now();
    let sol = run(&p).unwrap();
    let t = t0.elapsed().as_secs_f64();
    let errs = minkowski_errors(&sol);
    let max = errs.iter().fold(0.0f64, |m, e| m.max(e.1));
    b.record(
        "C1 minkowski",
        max <= FLAT_MAX_ERROR && t <= FLAT_RUNTIME_S,
        format!("max error {max:.3e} (<= {FLAT_MAX_ERROR:e}), runtime {t:.3} s (<= {FLAT_RUNTIME_S} s)"),
    );
}

fn c2(b: &mut Board) {
    let sols = all_ok(run_many(&doubling_params(&calibrated(40.0, 100), 3), &IntegratorSettings::default()));
    let rep = convergence_report(&sols).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for f in &rep.fields {
        for o in &f.orders {
            pass &= (ORDER_LO..=ORDER_HI).contains(o);
        }
        parts.push(format!("{} {:.3?}", f.field, f.orders));
    }
    for name in ["ray4", "cross4", "maxwell4"] {
        let r = rep.residual(name).unwrap();
        for x in &r.ratios {
            pass &= (RATIO_LO..=RATIO_HI).contains(x);
        }
        parts.push(format!("{name} ratios {:.3?}", r.ratios));
    }
    b.record(
        "C2 convergence",
        pass,
        format!("orders in [{ORDER_LO}, {ORDER_HI}], ratios in [{RATIO_LO}, {RATIO_HI}]: {}", parts.join("; ")),
    );
}

fn c3_c4_c6(b: &mut Board) {
    let params: Vec<RunParams> = [40.0, 80.0, 160.0].iter().map(|&a| calibrated(a, 200)).collect();
    let sols = all_ok(run_many(&params, &IntegratorSettings::default()));

    let mut pass = true;
    let mut parts = Vec::new();
    for s in &sols {
        let a = s.params().a;
        let floor = 1.0 / s.params().u_inf().abs();
        let min_exp = s.cones[0].points.iter().map(|p| sphere_diag(p, a).exp_out).fold(f64::INFINITY, f64::min);
        let flags = s.cones[0].points.iter().filter(|p| sphere_diag(p, a).trapped).count()
            + s.cones.iter().filter(|c| sphere_diag(&c.points[0], a).trapped).count();
        pass &= min_exp >= floor && flags == 0;
        parts.push(format!("a={a}: min exp {min_exp:.4e} >= {floor:.4e}, trapped flags {flags}"));
    }
    b.record("C3 initial cones untrapped", pass, parts.join("; "));

    let worst_t = sols.iter().map(|s| s.meta.wall_clock_s).fold(0.0, f64::max);
    match trapping_threshold(&sols) {
        Some(k) => {
            let s = &sols[k];
            let a = s.params().a;
            let d = sphere_diag(s.final_cone().points.last().unwrap(), a);
            let bound = -4.0 / a * (1.0 - TRAP_TOL);
            b.record(
                "C4 trapped surface",
                d.trapped && d.exp_out <= bound && d.exp_in < 0.0 && worst_t <= RUN_RUNTIME_S,
                format!(
                    "threshold a={a}: exp_out {:.4} <= {bound:.4}, exp_in {:.4} < 0, slowest run {worst_t:.2} s",
                    d.exp_out, d.exp_in
                ),
            );
        }
        None => b.record("C4 trapped surface", false, "no threshold a in {40, 80, 160}".into()),
    }

    let q = mass_exponent(&sols);
    let ms: Vec<f64> = sols.iter().map(|s| hawking_mass(s.cones[0].points.last().unwrap())).collect();
    b.record(
        "C6 mass scaling",
        (q - MASS_EXP).abs() <= MASS_EXP_TOL,
        format!("exponent {q:.4} (target {MASS_EXP} +- {MASS_EXP_TOL}), m(u_inf,1) = {ms:.4?}"),
    );
}

fn c5(b: &mut Board) {
    let p = calibrated(40.0, 200);
    assert_eq!(p.coupling, 0.01);
    assert!(p.pulse.phase_rate != 0.0);
    let fine = RunParams { n_u: 400, n_v: 400, ..p.clone() };
    let sols = all_ok(run_many(&[p.clone(), fine], &IntegratorSettings::default()));
    let q = charge(sols[0].cones[0].points.last().unwrap());
    let ea = p.coupling * p.a;
    let ratio = charge_identity_ratio(&sols[0], &sols[1]);
    b.record(
        "C5 charging",
        q >= ea / (2.0 * PI) && ratio <= IDENTITY_FACTOR && q <= CHARGE_C * ea,
        format!(
            "Q(u_inf,1) = {q:.6} >= {:.6}, identity defect / truncation {ratio:.3} <= {IDENTITY_FACTOR}, Q/(e a) {:.4} <= {CHARGE_C}",
            ea / (2.0 * PI),
            q / ea
        ),
    );
}

fn c7(b: &mut Board) {
    let p = calibrated(40.0, 200);
    let (rep, _, branch_b) = covariance_runs(&p, DELTA).unwrap();
    let bp = rescaled_params(&p, DELTA).unwrap();
    let b_fine = run(&RunParams { n_u: 400, n_v: 400, ..bp }).unwrap();
    let trunc = truncation_estimate(&branch_b, &b_fine).unwrap();
    let mut pass = true;
    let mut worst = (String::new(), 0.0f64, 0.0f64);
    for f in &rep.fields {
        let t = trunc.iter().find(|x| x.0 == f.field).unwrap().1;
        pass &= f.max <= COVARIANCE_FACTOR * t;
        if f.max >= worst.1 {
            worst = (f.field.clone(), f.max, t);
        }
    }
    b.record(
        "C7 rescaling covariance",
        pass,
        format!(
            "delta={DELTA}, e'={}: every field discrepancy <= {COVARIANCE_FACTOR} x truncation; largest {} {:.3e} vs truncation {:.3e}",
            rep.coupling_prime, worst.0, worst.1, worst.2
        ),
    );
}

fn c8(b: &mut Board) {
    let sol = run(&calibrated(40.0, 200)).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (sym, target, tol) in DECAY {
        let x = fit_decay(&sol, sym, V_STAR).unwrap().u_exponent.unwrap_or(f64::NAN);
        pass &= (x - target).abs() <= tol;
        parts.push(format!("{sym} {x:.3} ({target} +- {tol})"));
    }
    b.record("C8 decay rates", pass, format!("v*={V_STAR}: {}", parts.join(", ")));
}

fn c9(b: &mut Board) {
    let t0 = Instant::now();
    let reg = Registry::standard();
    let corpus = Corpus::standard();
    let lint = corpus.lint(&reg).unwrap();
    let muts = mutation_suite(&reg, &corpus).unwrap();
    let t = t0.elapsed().as_secs_f64();
    let eq_pass = lint.equations.iter().filter(|e| e.report.pass).count();
    let pairs = lint.pairs.iter().filter(|p| p.pass).count();
    let detected = muts.iter().filter(|m| m.detected()).count();
    b.record(
        "C9 signature suite",
        eq_pass == lint.equations.len()
            && pairs == PAIRS
            && lint.pairs.len() == PAIRS
            && detected == muts.len()
            && t <= LINT_RUNTIME_S,
        format!(
            "{eq_pass}/{} equations, {pairs}/{PAIRS} pairs, {detected}/{} mutations detected, {t:.3} s",
            lint.equations.len(),
            muts.len()
        ),
    );
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/solution_20x20.csv")
}

/// The fixed tiny run behind the golden file.
fn tiny() -> Solution {
    run(&calibrated(40.0, 20)).unwrap()
}

fn c10(b: &mut Board) {
    let sol = tiny();
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("run.ck");
    checkpoint(&sol, &ck).unwrap();
    let back = restore(&ck).unwrap();
    let ck2 = dir.path().join("again.ck");
    checkpoint(&back, &ck2).unwrap();
    let bit_exact = back.same_fields(&sol) && fs::read(&ck).unwrap() == fs::read(&ck2).unwrap();

    let mut csv = Vec::new();
    write_csv(&sol, &mut csv).unwrap();
    if std::env::var_os("EMCSF_BLESS").is_some() {
        fs::write(golden_path(), &csv).unwrap();
    }
    let golden = fs::read(golden_path()).unwrap();
    let stable = golden == csv;
    b.record(
        "C10 checkpoint and golden CSV",
        bit_exact && stable,
        format!(
            "checkpoint round trip bit-exact {bit_exact}, CSV matches golden ({} rows) {stable}",
            sol.cones.len() * 21
        ),
    );
}

fn main() {
    // `cargo test -- --list` style invocations only enumerate.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut b = Board { lines: Vec::new() };
    c1(&mut b);
    c2(&mut b);
    c3_c4_c6(&mut b);
    c5(&mut b);
    c7(&mut b);
    c8(&mut b);
    c9(&mut b);
    c10(&mut b);
    let failed = b.lines.iter().filter(|l| !l.1).count();
    println!("acceptance: {} of {} criteria passed", b.lines.len() - failed, b.lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
