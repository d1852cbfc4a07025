//! Command-line front end: data ingestion, calibration, testing, power
//! studies and SVG plots.

pub mod commands;
mod error;
pub mod heatmap;
pub mod ingest;
pub mod modelconfig;
pub mod report;

pub use error::{CliError, ExitCode};
