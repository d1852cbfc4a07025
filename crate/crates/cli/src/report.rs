//! JSON report written by `test` and `diagnose`.

use std::path::Path;

use critsurf::{RegressionDiagnostics, Sign, TestReport};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const REJECT: &str = "reject";
pub const ACCEPT: &str = "accept";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    /// one-based column along the x axis
    pub s: usize,
    /// one-based row along the y axis
    pub t: usize,
    pub sign: String,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionRecord {
    pub slope: f64,
    pub intercept: f64,
    pub fitted: Vec<f64>,
    pub leverage: Vec<f64>,
    pub studentized_residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub decision: String,
    pub reject_global: bool,
    pub eta: f64,
    pub alpha: f64,
    pub n: usize,
    pub k: usize,
    pub tie_broken: bool,
    pub cells: Vec<CellRecord>,
    /// `surface[s][t]`, zero-based
    pub surface: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regression: Option<RegressionRecord>,
}

impl ReportFile {
    pub fn from_report(report: &TestReport) -> Self {
        let summary = &report.surfaces_used;
        ReportFile {
            decision: if report.reject_global { REJECT } else { ACCEPT }.to_string(),
            reject_global: report.reject_global,
            eta: summary.eta,
            alpha: summary.alpha,
            n: summary.n,
            k: summary.k,
            tie_broken: report.tie_broken,
            cells: report
                .significant_cells
                .iter()
                .map(|c| CellRecord {
                    s: c.s + 1,
                    t: c.t + 1,
                    sign: match c.sign {
                        Sign::Positive => "positive",
                        Sign::Negative => "negative",
                    }
                    .to_string(),
                    value: c.value,
                    threshold: c.threshold,
                })
                .collect(),
            surface: report.surface.cells().to_nested(),
            regression: None,
        }
    }

    pub fn with_regression(mut self, d: &RegressionDiagnostics) -> Self {
        self.regression = Some(RegressionRecord {
            slope: d.slope,
            intercept: d.intercept,
            fitted: d.fitted.clone(),
            leverage: d.leverage.clone(),
            studentized_residuals: d.studentized_residuals.clone(),
        });
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report fields are finite");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Data(format!("malformed report: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        crate::heatmap::write_file(path, &self.to_json())
    }
}
