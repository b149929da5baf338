//! Scenario runner for `sepq-core`: seeded, reproducible experiments with
//! json, text and csv reports.

pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod scenarios;

pub use config::{Scenario, ScenarioConfig};
pub use emit::{emit, Format};
pub use error::CliError;
pub use report::Report;
pub use scenarios::run;
