use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use emcsf_core::evolve::{checkpoint, restore, run};
use emcsf_core::io::experiment::prepared_params;
use emcsf_core::io::{emit_plots, run_experiment, ExperimentConfig, ExperimentKind, ExperimentOutcome, PlotSelection};
use emcsf_core::sigcalc::{mutation_suite, tension_report, Corpus, Registry};

#[derive(Parser)]
#[command(name = "emcsf", version, about = "Charged scalar collapse experiments and the signature linter")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment preset.
    Run {
        /// Preset (minkowski, trapped, charging, scaling, convergence, decay, siglint, sweep).
        #[arg(long)]
        kind: Option<ExperimentKind>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Trapping threshold and mass scaling over several values of a.
    Sweep(RunOpts),
    /// Self-convergence study under grid doubling.
    Convergence(RunOpts),
    /// Covariance of the evolution under the scaling map.
    RescaleCheck(RunOpts),
    /// Check signature homogeneity of an equation corpus.
    Siglint(SiglintOpts),
    /// Write plots for a run or a stored checkpoint.
    Plot {
        /// Read the solution from this checkpoint instead of evolving.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Also store the evolved solution as a checkpoint.
        #[arg(long)]
        save_checkpoint: Option<PathBuf>,
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Args, Clone, Default)]
struct RunOpts {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long)]
    u_inf_factor: Option<f64>,
    #[arg(long)]
    n_u: Option<usize>,
    #[arg(long)]
    n_v: Option<usize>,
    /// Cells in both directions.
    #[arg(long)]
    n: Option<usize>,
    /// Scaling factor of the covariance check.
    #[arg(long)]
    delta: Option<f64>,
    /// Pose the problem directly on the scaled rectangle.
    #[arg(long)]
    delta_scale: Option<f64>,
    #[arg(long)]
    pulse_amp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pulse_phase_rate: Option<f64>,
    #[arg(long)]
    pulse_v0: Option<f64>,
    #[arg(long)]
    pulse_v1: Option<f64>,
    /// smooth-bump or sine-squared.
    #[arg(long)]
    pulse_profile: Option<String>,
    #[arg(long)]
    calibrate: Option<bool>,
    #[arg(long, env = "EMCSF_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    plot: bool,
    /// Comma-separated values of a for the sweep.
    #[arg(long)]
    sweep_a: Option<String>,
    #[arg(long)]
    v_star: Option<f64>,
    #[arg(long)]
    refinements: Option<usize>,
}

impl RunOpts {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut o = Vec::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                o.push((k, v));
            }
        };
        put("a", self.a.map(|x| x.to_string()));
        put("coupling", self.coupling.map(|x| x.to_string()));
        put("u-inf-factor", self.u_inf_factor.map(|x| x.to_string()));
        put("n", self.n.map(|x| x.to_string()));
        put("n-u", self.n_u.map(|x| x.to_string()));
        put("n-v", self.n_v.map(|x| x.to_string()));
        put("delta", self.delta.map(|x| x.to_string()));
        put("delta-scale", self.delta_scale.map(|x| x.to_string()));
        put("pulse-amp", self.pulse_amp.map(|x| x.to_string()));
        put("pulse-phase-rate", self.pulse_phase_rate.map(|x| x.to_string()));
        put("pulse-v0", self.pulse_v0.map(|x| x.to_string()));
        put("pulse-v1", self.pulse_v1.map(|x| x.to_string()));
        put("pulse-profile", self.pulse_profile.clone());
        put("calibrate", self.calibrate.map(|x| x.to_string()));
        put("out-dir", self.out_dir.as_ref().map(|p| p.display().to_string()));
        put("plot", self.plot.then(|| "true".to_string()));
        put("sweep-a", self.sweep_a.clone());
        put("v-star", self.v_star.map(|x| x.to_string()));
        put("refinements", self.refinements.map(|x| x.to_string()));
        o
    }

    /// Config from file (if any) and flags. `kind` is required unless the file names one.
    fn config(&self, kind: Option<ExperimentKind>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let cfg = ExperimentConfig::parse(&text).with_context(|| format!("in {}", path.display()))?;
                if let Some(k) = kind {
                    if k != cfg.kind {
                        bail!("{} sets kind = {}, but the command runs {k}", path.display(), cfg.kind);
                    }
                }
                cfg
            }
            None => match kind {
                Some(k) => ExperimentConfig::new(k),
                None => bail!("--kind or a --config file naming a kind is required"),
            },
        };
        for (k, v) in self.overrides() {
            cfg.set(k, &v).with_context(|| format!("--{k}"))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SiglintOpts {
    /// Equation files; the built-in corpus is used when none are given.
    files: Vec<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Use the printed table values instead of the index-rule values.
    #[arg(long)]
    printed: bool,
    /// Also run the single-entry mutation suite.
    #[arg(long)]
    mutations: bool,
    /// Also report table/rule tensions.
    #[arg(long)]
    tensions: bool,
}

fn report(out: &ExperimentOutcome) -> ExitCode {
    for a in &out.summary.assertions {
        println!("{} {:<40} {:>14.6e}  {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.value, a.bound);
    }
    for p in &out.artifacts {
        println!("wrote {}", p.display());
    }
    if out.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed: {}", out.failures().join(", "));
        ExitCode::from(1)
    }
}

fn siglint(o: &SiglintOpts) -> Result<ExitCode> {
    let reg = if o.printed { Registry::standard().with_printed_values() } else { Registry::standard() };
    let corpus = if o.files.is_empty() {
        Corpus::standard()
    } else {
        let mut c = Corpus::default();
        for f in &o.files {
            let text = fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
            let name = f.display().to_string();
            c.lines.extend(Corpus::parse_text(&name, &text)?.lines);
        }
        c
    };
    let lint = corpus.lint(&reg)?;
    let muts = if o.mutations { Some(mutation_suite(&reg, &corpus)?) } else { None };
    let tensions = if o.tensions { Some(tension_report(&reg, &corpus)?) } else { None };
    let undetected = muts.as_ref().map_or(0, |m| m.iter().filter(|m| !m.detected()).count());
    if o.json {
        let v = serde_json::json!({ "lint": lint, "mutations": muts, "tensions": tensions });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{lint}");
        if let Some(m) = &muts {
            println!("mutations: {} of {} detected", m.len() - undetected, m.len());
            for x in m.iter().filter(|m| !m.detected()) {
                println!("  undetected: {} {} -> {}", x.symbol, x.original, x.mutated);
            }
        }
        if let Some(t) = &tensions {
            for e in &t.entries {
                println!(
                    "tension {:<8} table {} used {} {}: {}",
                    e.symbol,
                    e.table,
                    e.used,
                    if e.consistent { "consistent" } else { "FLAGGED" },
                    e.note
                );
            }
        }
    }
    Ok(if lint.all_pass() && undetected == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    Ok(match cli.command {
        Command::Run { kind, opts } => report(&run_experiment(&opts.config(kind)?)?),
        Command::Sweep(o) => report(&run_experiment(&o.config(Some(ExperimentKind::Sweep))?)?),
        Command::Convergence(o) => report(&run_experiment(&o.config(Some(ExperimentKind::Convergence))?)?),
        Command::RescaleCheck(o) => report(&run_experiment(&o.config(Some(ExperimentKind::Scaling))?)?),
        Command::Siglint(o) => siglint(&o)?,
        Command::Plot { checkpoint: from, save_checkpoint, opts } => {
            let (sol, dir) = match from {
                Some(path) => {
                    let dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
                    (restore(&path).with_context(|| format!("restoring {}", path.display()))?, dir)
                }
                None => {
                    let cfg = opts.config(Some(opts_kind(&opts)))?;
                    (run(&prepared_params(&cfg)?)?, cfg.out_dir)
                }
            };
            if let Some(path) = save_checkpoint {
                checkpoint(&sol, &path)?;
                println!("wrote {}", path.display());
            }
            for p in emit_plots(&sol, &PlotSelection::standard(), &dir)? {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
    })
}

/// Kind used to build the run behind `plot`: the config file's, else trapped.
fn opts_kind(opts: &RunOpts) -> ExperimentKind {
    opts.config
        .as_ref()
        .and_then(|p| fs::read_to_string(p).ok())
        .and_then(|t| ExperimentConfig::parse(&t).ok())
        .map_or(ExperimentKind::Trapped, |c| c.kind)
}
