use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    pub n: usize,
    /// coarse grid size
    pub k: usize,
    /// global level
    pub alpha: f64,
    pub replicates: usize,
    pub master_seed: u64,
}

impl CalibrationConfig {
    /// Desk-scale default; 10⁶ replicates give finer resolution of the
    /// extreme order statistics at roughly ten times the cost.
    pub const DEFAULT_REPLICATES: usize = 100_000;
    pub const MIN_REPLICATES: usize = 1_000;
    pub const DEFAULT_ALPHA: f64 = 0.05;

    /// Defaults: `k = ⌊√n⌋`, `α = 0.05`, 10⁵ replicates, seed 0.
    pub fn new(n: usize) -> Self {
        CalibrationConfig {
            n,
            k: n.isqrt(),
            alpha: Self::DEFAULT_ALPHA,
            replicates: Self::DEFAULT_REPLICATES,
            master_seed: 0,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn cells(&self) -> usize {
        self.k * self.k
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.k > self.n {
            return Err(Error::arg(format!(
                "k = {} must satisfy 2 <= k <= n = {}",
                self.k, self.n
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::arg(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if self.replicates < Self::MIN_REPLICATES {
            return Err(Error::arg(format!(
                "replicates = {} is below the minimum of {}",
                self.replicates,
                Self::MIN_REPLICATES
            )));
        }
        Ok(())
    }
}
