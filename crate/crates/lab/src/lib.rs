//! Configuration, experiment orchestration, report files and the command
//! line for `hilfer-core`.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod verify;

pub use config::{load_config, ExperimentConfig, RunKind};
pub use error::LabError;
pub use runner::{run_experiment, RunOutput};
