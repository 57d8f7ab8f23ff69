//! Experiment sweeps behind the `myopic` binary: config validation,
//! evaluation and CSV/SVG output.

pub mod config;
pub mod report;
pub mod run;

pub use config::{validate_config, ExperimentConfig, Scenario, ValidationErrors};
pub use report::{format_sig, Table};
pub use run::run_experiment;
