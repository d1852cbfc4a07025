//! Applying calibrated surfaces to data.

mod regression;
mod report;

pub use regression::{diagnose_regression, fit_simple_ols, RegressionDiagnostics};
pub use report::{q_surface_of, run_test, run_test_with, SignificantCell, Sign, SurfaceSummary, TestReport};
