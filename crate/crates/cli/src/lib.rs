//! Configuration loading, experiment orchestration and report writing for
//! the `ssag` command-line tool.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run_command, Command, Outcome};
pub use config::{load_config, parse_config, ExperimentConfig};
pub use report::{config_hash, write_report, Table};
