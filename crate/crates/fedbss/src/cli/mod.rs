//! Experiment front-end: config files, the `fedbss` command set, and
//! summary reports.

mod commands;
pub mod config;
pub mod report;

pub use commands::run_cli;
pub use config::{parse_config, ExperimentConfig};
pub use report::{emit_report, experiment_summary, render_table, ExperimentSummary, SeedStats};
