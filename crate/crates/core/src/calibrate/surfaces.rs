use super::config::CalibrationConfig;
use super::ensemble::NullEnsemble;
use crate::depcore::QSurface;
use crate::grid::Grid;
use crate::{Error, Result};

/// Calibrated lower and upper thresholds for every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSurfaces {
    pub lower: Grid<f64>,
    pub upper: Grid<f64>,
    pub eta: f64,
    pub config: CalibrationConfig,
    pub achieved_global_size: f64,
}

impl CriticalSurfaces {
    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn k(&self) -> usize {
        self.config.k
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha
    }

    /// True when any cell of `cells` (row-major `k × k`) leaves its band.
    pub fn any_exceedance(&self, cells: &[f64]) -> bool {
        exceeds(cells, self.lower.as_slice(), self.upper.as_slice())
    }

    pub fn exceeded_by(&self, surface: &QSurface) -> bool {
        self.any_exceedance(surface.cells().as_slice())
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let k = self.config.k;
        for (name, m) in [("lower", &self.lower), ("upper", &self.upper)] {
            if m.rows() != k || m.cols() != k {
                return Err(Error::arg(format!(
                    "{name} surface is {}x{}, expected {k}x{k}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.as_slice().iter().any(|v| v.is_nan()) {
                return Err(Error::arg(format!("{name} surface contains NaN")));
            }
        }
        for s in 0..k {
            for t in 0..k {
                let (lo, hi) = (self.lower[(s, t)], self.upper[(s, t)]);
                if lo > hi {
                    return Err(Error::arg(format!(
                        "lower > upper at cell ({}, {}): {lo} > {hi}",
                        s + 1,
                        t + 1
                    )));
                }
                if lo > 0.0 || hi < 0.0 {
                    return Err(Error::arg(format!(
                        "band [{lo}, {hi}] at cell ({}, {}) does not contain 0",
                        s + 1,
                        t + 1
                    )));
                }
            }
        }
        let n = self.config.n as f64;
        let alpha = self.config.alpha;
        if !(self.eta >= alpha / (n * n) && self.eta <= alpha) {
            return Err(Error::arg(format!(
                "eta = {} outside [alpha/n^2, alpha] = [{}, {alpha}]",
                self.eta,
                alpha / (n * n)
            )));
        }
        if !(0.0..=1.0).contains(&self.achieved_global_size) {
            return Err(Error::arg(format!(
                "achieved_global_size = {} is not a probability",
                self.achieved_global_size
            )));
        }
        Ok(())
    }
}

/// Relative margin a value must clear to count as crossing a threshold.
///
/// Null `q̂_n` values are discrete near the corners of the square and the
/// thresholds are themselves ensemble values, so a surface can sit exactly on
/// a threshold. Kernels may round the same count pattern differently in the
/// last bits; the margin makes such ties compare equal for every kernel. Real
/// gaps between distinct `q̂_n` values are several orders of magnitude larger.
pub const CROSSING_TOLERANCE: f64 = 1e-9;

pub fn crosses_upper(value: f64, upper: f64) -> bool {
    value > upper + CROSSING_TOLERANCE * (1.0 + upper.abs())
}

pub fn crosses_lower(value: f64, lower: f64) -> bool {
    value < lower - CROSSING_TOLERANCE * (1.0 + lower.abs())
}

fn exceeds(cells: &[f64], lower: &[f64], upper: &[f64]) -> bool {
    cells
        .iter()
        .zip(lower.iter().zip(upper))
        .any(|(&v, (&lo, &hi))| crosses_lower(v, lo) || crosses_upper(v, hi))
}

/// Fraction of replicates in `ensemble` with at least one cell outside the band.
pub fn exceedance_fraction(ensemble: &NullEnsemble, lower: &Grid<f64>, upper: &Grid<f64>) -> f64 {
    let (lo, hi) = (lower.as_slice(), upper.as_slice());
    let hits = ensemble.iter().filter(|rep| exceeds(rep, lo, hi)).count();
    hits as f64 / ensemble.replicates() as f64
}

/// `⌊replicates · η / 2⌋`, tolerant of the rounding in `η = 2m / replicates`.
pub fn order_index(replicates: usize, eta: f64) -> usize {
    let x = replicates as f64 * eta / 2.0;
    (x * (1.0 + 1e-12)).floor() as usize
}

/// Per-cell replicate values sorted ascending, cell-major.
struct SortedCells {
    replicates: usize,
    sorted: Vec<f64>,
}

impl SortedCells {
    fn new(ensemble: &NullEnsemble) -> Self {
        let r = ensemble.replicates();
        let cells = ensemble.config().cells();
        let mut sorted = vec![0.0; r * cells];
        for (i, rep) in ensemble.iter().enumerate() {
            for (c, &v) in rep.iter().enumerate() {
                sorted[c * r + i] = v;
            }
        }
        for col in sorted.chunks_mut(r) {
            col.sort_unstable_by(f64::total_cmp);
        }
        SortedCells { replicates: r, sorted }
    }

    /// Lower threshold is the `m`-th order statistic from below (zero based),
    /// so at most `m` replicates lie strictly below it; `m = 0` gives −∞.
    fn band(&self, k: usize, m: usize) -> (Grid<f64>, Grid<f64>) {
        let r = self.replicates;
        let (lower, upper) = if m == 0 {
            (vec![f64::NEG_INFINITY; k * k], vec![f64::INFINITY; k * k])
        } else {
            let m = m.min(r - 1);
            self.sorted
                .chunks(r)
                .map(|col| (col[m], col[r - 1 - m]))
                .unzip()
        };
        (Grid::from_vec(k, k, lower), Grid::from_vec(k, k, upper))
    }
}

/// Per-cell thresholds at local level `eta`: each side cuts off at most
/// `⌊replicates · η/2⌋` ensemble values.
pub fn surfaces_for_eta(ensemble: &NullEnsemble, eta: f64) -> Result<(Grid<f64>, Grid<f64>)> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::arg(format!("eta = {eta} must lie in (0, 1]")));
    }
    let m = order_index(ensemble.replicates(), eta);
    Ok(SortedCells::new(ensemble).band(ensemble.config().k, m))
}

/// Finds the largest order-statistic level `m` (local level `η = 2m/R`) whose
/// ensemble-wide crossing probability is at most `alpha`.
pub fn calibrate_eta(ensemble: &NullEnsemble, alpha: f64) -> Result<CriticalSurfaces> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::arg(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let mut config = ensemble.config().clone();
    config.alpha = alpha;
    let k = config.k;
    let r = ensemble.replicates();
    let sorted = SortedCells::new(ensemble);
    let size_at = |m: usize| {
        let (lo, hi) = sorted.band(k, m);
        exceedance_fraction(ensemble, &lo, &hi)
    };

    // Invariant: size_at(lo) <= alpha < size_at(hi) (hi may be one past the range).
    let m_max = order_index(r, alpha);
    let mut lo = 0;
    let mut lo_size = 0.0;
    let top = size_at(m_max);
    let (best, best_size) = if top <= alpha {
        (m_max, top)
    } else {
        let mut hi = m_max;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let size = size_at(mid);
            if size <= alpha {
                lo = mid;
                lo_size = size;
            } else {
                hi = mid;
            }
        }
        (lo, lo_size)
    };
    if best == 0 {
        return Err(Error::Calibration(format!(
            "{r} replicates cannot resolve a positive local level at alpha = {alpha}; increase replicates"
        )));
    }
    let eta = 2.0 * best as f64 / r as f64;
    let n = config.n as f64;
    if eta < alpha / (n * n) {
        return Err(Error::Calibration(format!(
            "calibrated eta = {eta} falls below alpha/n^2 = {}",
            alpha / (n * n)
        )));
    }
    let (lower, upper) = sorted.band(k, best);
    Ok(CriticalSurfaces {
        lower,
        upper,
        eta,
        config,
        achieved_global_size: best_size,
    })
}
