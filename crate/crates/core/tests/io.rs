use std::fs;

use emcsf_core::evolve::run;
use emcsf_core::io::experiment::prepared_params;
use emcsf_core::io::plot::expansion_grid;
use emcsf_core::io::{read_csv_file, run_experiment, ExperimentConfig, ExperimentKind, Summary, CSV_COLUMNS};

fn config(text: &str, dir: &std::path::Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::parse(text).unwrap();
    cfg.out_dir = dir.to_path_buf();
    cfg
}

#[test]
fn trapped_preset_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("kind = trapped\nn = 60\n", dir.path());
    let out = run_experiment(&cfg).unwrap();
    assert!(out.passed(), "{:?}", out.failures());

    let rows = read_csv_file(dir.path().join("solution.csv")).unwrap();
    assert_eq!(rows.len(), 61 * 61);
    let last = rows.last().unwrap();
    assert_eq!((last.u, last.v), (-10.0, 1.0));
    assert_eq!(CSV_COLUMNS.len(), 22);

    let s = Summary::read(dir.path().join("summary.json")).unwrap();
    for key in ["trapped.initialExpansionMin", "trapped.initialTrapped", "trapped.finalExpOut", "trapped.finalExpIn"] {
        assert!(s.get(key).is_some(), "missing {key}");
    }
    let run = &s.runs[0];
    assert!(run.lower_bounds.trap_pass && run.lower_bounds.charge_pass);
    assert!(!run.trapped_locus.boundary.is_empty());
}

#[test]
fn trapped_heatmap_has_negative_region_at_the_corner() {
    let cfg = config("kind = trapped\nn = 40\n", std::path::Path::new("unused"));
    let sol = run(&prepared_params(&cfg).unwrap()).unwrap();
    let g = expansion_grid(&sol);
    let (x, trapped) = *g.last().unwrap().last().unwrap();
    assert!(x < 0.0 && trapped);
    assert!(g.iter().flatten().filter(|p| p.0 < 0.0).count() > 1);
}

#[test]
fn charging_preset_reports_the_charge_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config("kind = charging\nn = 100\n", dir.path())).unwrap();
    assert!(out.passed(), "{:?}", out.failures());
    let q = out.summary.get("charging.qInitial").unwrap();
    assert!(q >= 0.01 * 40.0 / (2.0 * std::f64::consts::PI));
}

#[test]
fn sweep_writes_one_directory_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config("kind = sweep\nn = 60\nsweep-a = 40, 80, 160\n", dir.path())).unwrap();
    for a in ["a40", "a80", "a160"] {
        assert!(dir.path().join(a).join("solution.csv").exists());
    }
    assert_eq!(out.summary.runs.len(), 3);
    assert!(out.summary.get("sweep.massExponent").is_some());
    assert!(out.summary.get("sweep.thresholdA").is_some());
}

#[test]
fn convergence_and_scaling_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config("kind = convergence\nn = 50\n", &dir.path().join("c"))).unwrap();
    let conv = out.summary.convergence.as_ref().unwrap();
    assert_eq!(conv.resolutions, vec![(50, 50), (100, 100), (200, 200)]);
    assert!(out.summary.get("convergence.order.r.0").is_some());

    let out = run_experiment(&config("kind = scaling\nn = 40\ndelta = 0.5\n", &dir.path().join("s"))).unwrap();
    assert!(out.passed(), "{:?}", out.failures());
    assert_eq!(out.summary.covariance.as_ref().unwrap().coupling_prime, 0.02);
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("kind = scaling\n", dir.path());
    cfg.delta = None;
    assert!(run_experiment(&cfg).is_err());
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
    assert!(ExperimentConfig::parse("kind = decay\nv-star = 2\n").unwrap().validate().is_err());
    assert_eq!(ExperimentConfig::new(ExperimentKind::Minkowski).params.pulse.amp, 0.0);
}
