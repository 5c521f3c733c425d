//! Command-line front end: run configuration, pipeline orchestration, JSON
//! reports and SVG cross-sections.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod render;
pub mod report;

pub use commands::run;
pub use config::RunConfig;
pub use error::{CliError, Failure};
pub use report::RunReport;
