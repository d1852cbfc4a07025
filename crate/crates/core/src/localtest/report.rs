use serde::Serialize;

use crate::calibrate::{crosses_lower, crosses_upper, CriticalSurfaces};
use crate::depcore::{compute_ranks, BlockedKernel, QSurface, Sample, SurfaceKernel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// above the upper surface
    Positive,
    /// below the lower surface
    Negative,
}

/// A crossing at zero-based cell `(s, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificantCell {
    pub s: usize,
    pub t: usize,
    pub sign: Sign,
    pub value: f64,
    pub threshold: f64,
}

/// Parameters of the surfaces a report was computed against.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSummary {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub reject_global: bool,
    pub significant_cells: Vec<SignificantCell>,
    pub surface: QSurface,
    pub surfaces_used: SurfaceSummary,
    pub tie_broken: bool,
}

impl TestReport {
    pub fn positive_cells(&self) -> impl Iterator<Item = &SignificantCell> {
        self.significant_cells.iter().filter(|c| c.sign == Sign::Positive)
    }

    pub fn negative_cells(&self) -> impl Iterator<Item = &SignificantCell> {
        self.significant_cells.iter().filter(|c| c.sign == Sign::Negative)
    }
}

/// Rank-transforms `sample` and returns its `q̂_n` surface on a `k × k` grid,
/// plus whether ties had to be broken.
pub fn q_surface_of(sample: &Sample, k: usize, seed: u64, kernel: &dyn SurfaceKernel) -> Result<(QSurface, bool)> {
    let ranks = compute_ranks(sample, seed);
    let prepared = kernel.prepare(sample.len(), k)?;
    Ok((prepared.surface(&ranks.y_by_x_rank()), ranks.tie_broken()))
}

/// Tests `sample` against `cs`; `seed` only drives tie breaking.
pub fn run_test(sample: &Sample, cs: &CriticalSurfaces, seed: u64) -> Result<TestReport> {
    run_test_with(sample, cs, seed, &BlockedKernel)
}

pub fn run_test_with(
    sample: &Sample,
    cs: &CriticalSurfaces,
    seed: u64,
    kernel: &dyn SurfaceKernel,
) -> Result<TestReport> {
    if sample.len() != cs.n() {
        return Err(Error::SizeMismatch {
            sample: sample.len(),
            surfaces: cs.n(),
        });
    }
    let k = cs.k();
    let (surface, tie_broken) = q_surface_of(sample, k, seed, kernel)?;
    let mut significant_cells = Vec::new();
    for s in 0..k {
        for t in 0..k {
            let value = surface.cell(s, t);
            let (lo, hi) = (cs.lower[(s, t)], cs.upper[(s, t)]);
            let crossing = if crosses_upper(value, hi) {
                Some((Sign::Positive, hi))
            } else if crosses_lower(value, lo) {
                Some((Sign::Negative, lo))
            } else {
                None
            };
            if let Some((sign, threshold)) = crossing {
                significant_cells.push(SignificantCell {
                    s,
                    t,
                    sign,
                    value,
                    threshold,
                });
            }
        }
    }
    Ok(TestReport {
        reject_global: !significant_cells.is_empty(),
        significant_cells,
        surface,
        surfaces_used: SurfaceSummary {
            n: cs.n(),
            k,
            alpha: cs.alpha(),
            eta: cs.eta,
        },
        tie_broken,
    })
}
