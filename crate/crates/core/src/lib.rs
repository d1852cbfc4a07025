//! Local independence testing for bivariate samples.
//!
//! The test statistic is the quantile dependence function estimated from
//! ranks, averaged over a coarse `k × k` grid of cells. Each cell gets its own
//! lower and upper threshold (the *critical surfaces*), calibrated by Monte
//! Carlo under independence so that the probability of any crossing stays at
//! the requested global level. A rejection therefore also says *where* the
//! dependence lives and in which direction.
//!
//! Modules:
//! - [`depcore`]: ranks, empirical copula counts, fine and coarse surfaces,
//!   exact hypergeometric and normal distributions.
//! - [`calibrate`]: null ensembles, local level calibration, surface cache files.
//! - [`localtest`]: applying surfaces to data, regression diagnostics.
//! - [`simlab`]: data-generating model registry and the power harness.

pub mod calibrate;
pub mod depcore;
mod error;
pub mod grid;
pub mod localtest;
pub mod rng;
pub mod simlab;

pub use calibrate::{
    calibrate_eta, load_surfaces, sample_null_surface, save_surfaces, surfaces_for_eta,
    CalibrationConfig, CriticalSurfaces, NullEnsemble,
};
pub use depcore::{
    coarsen, compute_ranks, copula_grid, fine_q_surface, CopulaGrid, FineQSurface, QSurface,
    RankPairs, Sample,
};
pub use error::{Error, Result};
pub use grid::Grid;
pub use localtest::{diagnose_regression, fit_simple_ols, run_test, RegressionDiagnostics, Sign, TestReport};
pub use simlab::{empirical_power, generate, ModelSpec, PowerResult};
