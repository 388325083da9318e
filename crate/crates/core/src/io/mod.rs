//! Configuration, experiment presets and persistent outputs.

pub mod config;
pub mod convergence;
pub mod experiment;
pub mod plot;
pub mod summary;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind, CONFIG_KEYS};
pub use convergence::{convergence_report, convergence_study, ConvergenceReport};
pub use experiment::{run_experiment, ExperimentOutcome};
pub use plot::{emit_plots, PlotSelection};
pub use summary::{Assertion, RunRecord, Summary, TrappedLocus};
pub use table::{read_csv, read_csv_file, write_csv, write_csv_file, SolutionRow, CSV_COLUMNS, CSV_SCHEMA};
