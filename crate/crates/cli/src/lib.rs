//! Experiment harness behind the `mdlearn` binary: configuration parsing,
//! run records with stable CSV/JSON renderings, and the execution paths for
//! single runs, scaling sweeps, and the robust-training comparison.

pub mod config;
pub mod records;
pub mod runner;

pub use config::{Algorithm, ExperimentConfig, InstanceSource, OutputFormat};
pub use records::{to_csv, to_json, RunRecord, CSV_HEADER};
pub use runner::{
    exact_opt, imbalanced_logistic_task, lower_bound_sweep, materialize, mdl_iterations,
    rmdl_head_to_head, run_experiment, samples_to_target, sweep, HeadToHead, SweepAxis,
    TargetSearch,
};
