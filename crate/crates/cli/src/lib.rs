//! Command-line front end: configuration, the end-to-end pipeline, and the
//! plain-text/CSV report writer.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;

pub use error::{CliError, CliResult, Outcome};
