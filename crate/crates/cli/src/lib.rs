//! Batch front-end for `hadamard-core`: experiment configs, point IO,
//! command dispatch and JSON/CSV reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod points;
pub mod report;
pub mod run;

pub use config::{Command, ExperimentConfig, Format};
pub use error::{CliError, CliResult};
pub use run::{execute, run};
