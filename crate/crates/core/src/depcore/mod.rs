//! Rank statistics, empirical copula surfaces and the exact null distributions.

mod gap;
mod hypergeom;
pub mod kernel;
mod normal;
mod sample;
mod surface;

pub use gap::normal_approx_gap;
pub use hypergeom::{hypergeom_cdf, hypergeom_pmf, HypergeomParams};
pub use kernel::{BlockedKernel, DirectKernel, KernelRegistry, PreparedKernel, SurfaceKernel};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, normal_sf};
pub use sample::{compute_ranks, RankPairs, Sample};
pub use surface::{cell_of, coarsen, copula_grid, fine_q_surface, CopulaGrid, FineQSurface, QSurface};
