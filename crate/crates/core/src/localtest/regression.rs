use crate::calibrate::CriticalSurfaces;
use crate::depcore::Sample;
use crate::localtest::report::{run_test, TestReport};
use crate::{Error, Result};

/// Simple least-squares fit with internally studentized residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDiagnostics {
    pub slope: f64,
    pub intercept: f64,
    pub fitted: Vec<f64>,
    pub leverage: Vec<f64>,
    pub studentized_residuals: Vec<f64>,
}

/// Regresses `y` on `x`. Residuals are `e_i / (σ̂ √(1 − h_i))` with
/// `σ̂² = RSS / (n − 2)` and `h_i = 1/n + (x_i − x̄)² / Sxx`. A fit whose
/// residual scale is at rounding level reports all-zero residuals.
pub fn fit_simple_ols(x: &[f64], y: &[f64]) -> Result<RegressionDiagnostics> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::arg(format!("x has {n} values but y has {}", y.len())));
    }
    if n < 3 {
        return Err(Error::arg(format!("regression needs at least 3 points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::arg("regression data must be finite"));
    }
    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_y = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mean_x).powi(2)).sum();
    if sxx <= f64::EPSILON * x.iter().map(|v| v * v).sum::<f64>() {
        return Err(Error::arg("x is constant; the slope is not identifiable"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mean_x) * (b - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let fitted: Vec<f64> = x.iter().map(|v| intercept + slope * v).collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let leverage: Vec<f64> = x.iter().map(|v| 1.0 / nf + (v - mean_x).powi(2) / sxx).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma = (rss / (nf - 2.0)).sqrt();
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let studentized_residuals = if sigma <= 1e-12 * scale {
        vec![0.0; n]
    } else {
        residuals
            .iter()
            .zip(&leverage)
            .map(|(e, h)| e / (sigma * (1.0 - h).max(0.0).sqrt()))
            .collect()
    };
    Ok(RegressionDiagnostics {
        slope,
        intercept,
        fitted,
        leverage,
        studentized_residuals,
    })
}

/// Tests (fitted value, studentized residual) pairs for local dependence.
pub fn diagnose_regression(
    x: &[f64],
    y: &[f64],
    cs: &CriticalSurfaces,
    seed: u64,
) -> Result<(RegressionDiagnostics, TestReport)> {
    if x.len() != cs.n() {
        return Err(Error::SizeMismatch {
            sample: x.len(),
            surfaces: cs.n(),
        });
    }
    let diag = fit_simple_ols(x, y)?;
    let sample = Sample::from_columns(&diag.fitted, &diag.studentized_residuals)?;
    let report = run_test(&sample, cs, seed)?;
    Ok((diag, report))
}
