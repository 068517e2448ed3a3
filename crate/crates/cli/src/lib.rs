//! Command-line front end for the `cel` library.

pub mod commands;
pub mod dataset;
pub mod error;
pub mod plot;
pub mod report;
pub mod tables;

pub use commands::{run, Cli, Outcome};
pub use error::CliError;
