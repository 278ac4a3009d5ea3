//! Configuration, mode pipelines and report files behind the `mchrift` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_str, ExperimentConfig, KappaSource};
pub use run::{
    emit_report, error_json, fit_convergence, run_compare, run_experiment, zone_points, CompareOutcome, CompareRow, ConvergenceFit, Mode,
    Report, Verdict,
};
