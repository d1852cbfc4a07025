//! Monte-Carlo calibration of the critical surfaces.
//!
//! Under independence the y-ranks are a uniform random permutation of the
//! x-ranks, so a null replicate is one shuffled permutation pushed through a
//! surface kernel. Per cell, the lower surface is a low order statistic of the
//! replicates and the upper surface the matching high one; the local level η
//! is the largest order-statistic level whose ensemble-wide probability of
//! *any* crossing stays within the global level α.

mod cache;
mod config;
mod ensemble;
mod surfaces;

pub use cache::{load_surfaces, save_surfaces, surfaces_from_json, surfaces_to_json, FORMAT_VERSION};
pub use config::CalibrationConfig;
pub use ensemble::{null_permutation, sample_null_surface, sample_null_surface_with, NullEnsemble};
pub use surfaces::{
    calibrate_eta, crosses_lower, crosses_upper, exceedance_fraction, order_index, surfaces_for_eta, CriticalSurfaces, CROSSING_TOLERANCE,
};
