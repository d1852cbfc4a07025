use rayon::prelude::*;

use super::models::{ModelRegistry, ModelSpec};
use crate::calibrate::CriticalSurfaces;
use crate::depcore::Sample;
use crate::localtest::run_test;
use crate::rng::split_seed;
use crate::{Error, Result};

/// Anything that can accept or reject independence for one sample. The
/// critical-surface test implements it; a competing global test can be
/// plugged into [`empirical_power_with`] the same way.
pub trait IndependenceTest: Send + Sync {
    fn name(&self) -> &str;

    /// Sample size the test is calibrated for.
    fn n(&self) -> usize;

    fn k(&self) -> Option<usize>;

    fn alpha(&self) -> f64;

    fn rejects(&self, sample: &Sample, seed: u64) -> Result<bool>;
}

pub struct CriticalSurfaceTest<'a>(pub &'a CriticalSurfaces);

impl IndependenceTest for CriticalSurfaceTest<'_> {
    fn name(&self) -> &str {
        "critical-surface"
    }

    fn n(&self) -> usize {
        self.0.n()
    }

    fn k(&self) -> Option<usize> {
        Some(self.0.k())
    }

    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    fn rejects(&self, sample: &Sample, seed: u64) -> Result<bool> {
        Ok(run_test(sample, self.0, seed)?.reject_global)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub model: ModelSpec,
    pub test: String,
    pub n: usize,
    pub k: Option<usize>,
    pub alpha: f64,
    pub repetitions: usize,
    pub rejections: usize,
    pub power: f64,
    /// 95% normal-approximation half width
    pub mc_half_width: f64,
}

impl PowerResult {
    /// Binomial standard error of `power`.
    pub fn standard_error(&self) -> f64 {
        self.mc_half_width / 1.96
    }
}

pub fn empirical_power(model: &ModelSpec, cs: &CriticalSurfaces, repetitions: usize, seed: u64) -> Result<PowerResult> {
    empirical_power_with(&ModelRegistry::default(), model, &CriticalSurfaceTest(cs), repetitions, seed)
}

/// Repetition `r` draws its data with seed `split_seed(seed, r)` and breaks
/// ties with the next split of that seed, independent of worker count.
pub fn empirical_power_with(
    registry: &ModelRegistry,
    model: &ModelSpec,
    test: &dyn IndependenceTest,
    repetitions: usize,
    seed: u64,
) -> Result<PowerResult> {
    if repetitions < 100 {
        return Err(Error::arg(format!("repetitions = {repetitions} is below the minimum of 100")));
    }
    let resolved = registry.resolve(model)?;
    let n = test.n();
    let decisions: Vec<bool> = (0..repetitions as u64)
        .into_par_iter()
        .map(|r| {
            let rep_seed = split_seed(seed, r);
            let sample = resolved.sample(n, rep_seed)?;
            test.rejects(&sample, split_seed(rep_seed, 0))
        })
        .collect::<Result<_>>()?;
    let rejections = decisions.iter().filter(|&&d| d).count();
    let power = rejections as f64 / repetitions as f64;
    Ok(PowerResult {
        model: model.clone(),
        test: test.name().to_string(),
        n,
        k: test.k(),
        alpha: test.alpha(),
        repetitions,
        rejections,
        power,
        mc_half_width: 1.96 * (power * (1.0 - power) / repetitions as f64).sqrt(),
    })
}
