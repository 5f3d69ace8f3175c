//! Scenario runner behind the `analyze` binary.

pub mod config;
pub mod error;
pub mod matrix_io;
pub mod report;
pub mod run;

pub use config::{Scenario, ScenarioConfig, Tolerances};
pub use error::{CliError, Result};
pub use report::{AnalysisReport, Verdict, SCHEMA_VERSION};
pub use run::run_scenario;
