use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::config::CalibrationConfig;
use crate::depcore::{BlockedKernel, QSurface, SurfaceKernel};
use crate::rng::{rng_from_seed, split_seed};
use crate::Result;

fn fill_permutation(buf: &mut [usize], seed: u64) {
    for (i, v) in buf.iter_mut().enumerate() {
        *v = i + 1;
    }
    buf.shuffle(&mut rng_from_seed(seed));
}

/// Uniform random permutation of `1..=n` determined by `seed`.
pub fn null_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut buf = vec![0; n];
    fill_permutation(&mut buf, seed);
    buf
}

/// One `q̂_n` surface drawn under independence.
pub fn sample_null_surface(config: &CalibrationConfig, replicate_seed: u64) -> Result<QSurface> {
    sample_null_surface_with(config, replicate_seed, &BlockedKernel)
}

pub fn sample_null_surface_with(
    config: &CalibrationConfig,
    replicate_seed: u64,
    kernel: &dyn SurfaceKernel,
) -> Result<QSurface> {
    config.validate()?;
    let prepared = kernel.prepare(config.n, config.k)?;
    Ok(prepared.surface(&null_permutation(config.n, replicate_seed)))
}

/// Null replicates of the coarse surface, stored replicate-major.
#[derive(Debug, Clone)]
pub struct NullEnsemble {
    config: CalibrationConfig,
    values: Vec<f64>,
}

impl NullEnsemble {
    pub fn generate(config: &CalibrationConfig) -> Result<Self> {
        Self::generate_with(config, &BlockedKernel)
    }

    /// Replicate `r` uses seed `split_seed(master_seed, r)`, so the result does
    /// not depend on how rayon schedules the work.
    pub fn generate_with(config: &CalibrationConfig, kernel: &dyn SurfaceKernel) -> Result<Self> {
        config.validate()?;
        let prepared = kernel.prepare(config.n, config.k)?;
        let cells = config.cells();
        let mut values = vec![0.0; config.replicates * cells];
        let n = config.n;
        let master = config.master_seed;
        values
            .par_chunks_mut(cells)
            .enumerate()
            .for_each_init(
                || vec![0usize; n],
                |perm, (r, out)| {
                    fill_permutation(perm, split_seed(master, r as u64));
                    prepared.cells_into(perm, out);
                },
            );
        Ok(NullEnsemble {
            config: config.clone(),
            values,
        })
    }

    /// Wraps precomputed replicate-major values (`replicates × k²`).
    pub fn from_values(config: &CalibrationConfig, values: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if values.len() != config.replicates * config.cells() {
            return Err(crate::Error::arg(format!(
                "expected {} values for {} replicates of {} cells, got {}",
                config.replicates * config.cells(),
                config.replicates,
                config.cells(),
                values.len()
            )));
        }
        Ok(NullEnsemble {
            config: config.clone(),
            values,
        })
    }

    pub fn config(&self) -> &CalibrationConfig {
        &self.config
    }

    pub fn replicates(&self) -> usize {
        self.config.replicates
    }

    pub fn replicate(&self, r: usize) -> &[f64] {
        let c = self.config.cells();
        &self.values[r * c..(r + 1) * c]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.config.cells())
    }

    pub fn cell_values(&self, cell: usize) -> Vec<f64> {
        self.iter().map(|rep| rep[cell]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}
