use super::sample::RankPairs;
use crate::grid::Grid;
use crate::{Error, Result};

/// `counts[(i, j)] = n · C_n(i/n, j/n)` for `i, j ∈ 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaGrid {
    n: usize,
    counts: Grid<u32>,
}

impl CopulaGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &Grid<u32> {
        &self.counts
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[(i, j)]
    }
}

/// `q_n` on the full lattice `(i/n, j/n)`, zero on the boundary of the square.
#[derive(Debug, Clone, PartialEq)]
pub struct FineQSurface {
    n: usize,
    values: Grid<f64>,
}

impl FineQSurface {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &Grid<f64> {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }
}

/// Cell-averaged quantile dependence on a `k × k` grid.
///
/// Cell `(s, t)` (zero based) is `(s/k, (s+1)/k] × (t/k, (t+1)/k]`; the first
/// index runs along the x (u) axis.
#[derive(Debug, Clone, PartialEq)]
pub struct QSurface {
    pub(crate) n: usize,
    pub(crate) k: usize,
    pub(crate) cells: Grid<f64>,
    pub(crate) cell_counts: Grid<usize>,
}

impl QSurface {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cells(&self) -> &Grid<f64> {
        &self.cells
    }

    pub fn cell_counts(&self) -> &Grid<usize> {
        &self.cell_counts
    }

    pub fn cell(&self, s: usize, t: usize) -> f64 {
        self.cells[(s, t)]
    }

    pub(crate) fn from_parts(n: usize, k: usize, cells: Vec<f64>) -> Self {
        QSurface {
            n,
            k,
            cells: Grid::from_vec(k, k, cells),
            cell_counts: cell_count_grid(n, k),
        }
    }
}

/// Zero-based cell index of fine lattice index `i ∈ 1..=n`: the unique `s`
/// with `s/k < i/n ≤ (s+1)/k`.
pub fn cell_of(i: usize, n: usize, k: usize) -> usize {
    debug_assert!((1..=n).contains(&i) && k <= n);
    (i * k).div_ceil(n) - 1
}

pub(crate) fn cell_sizes(n: usize, k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for i in 1..=n {
        sizes[cell_of(i, n, k)] += 1;
    }
    sizes
}

fn cell_count_grid(n: usize, k: usize) -> Grid<usize> {
    let sizes = cell_sizes(n, k);
    let mut g = Grid::filled(k, k, 0);
    for s in 0..k {
        for t in 0..k {
            g[(s, t)] = sizes[s] * sizes[t];
        }
    }
    g
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::arg(format!("grid size k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    Ok(())
}

/// Empirical copula counts by a 2-D prefix sum over the rank permutation matrix.
pub fn copula_grid(ranks: &RankPairs) -> CopulaGrid {
    let n = ranks.n();
    let mut counts = Grid::filled(n + 1, n + 1, 0u32);
    for (&r, &s) in ranks.r().iter().zip(ranks.s()) {
        counts[(r, s)] = 1;
    }
    for i in 1..=n {
        let mut row_sum = 0;
        for j in 1..=n {
            row_sum += counts[(i, j)];
            counts[(i, j)] = counts[(i - 1, j)] + row_sum;
        }
    }
    CopulaGrid { n, counts }
}

/// `q_n(u, v) = (C_n(u, v) − uv) / √(uv(1−u)(1−v))` at every lattice point.
pub fn fine_q_surface(grid: &CopulaGrid) -> FineQSurface {
    let n = grid.n;
    let nf = n as f64;
    let mut values = Grid::filled(n + 1, n + 1, 0.0);
    for i in 1..n {
        let u = i as f64 / nf;
        for j in 1..n {
            let v = j as f64 / nf;
            let c = f64::from(grid.counts[(i, j)]) / nf;
            values[(i, j)] = (c - u * v) / (u * v * (1.0 - u) * (1.0 - v)).sqrt();
        }
    }
    FineQSurface { n, values }
}

/// Averages the fine values with `i, j ∈ 1..=n` over each half-open cell.
pub fn coarsen(fine: &FineQSurface, k: usize) -> Result<QSurface> {
    let n = fine.n;
    check_k(n, k)?;
    let mut sums = Grid::filled(k, k, 0.0);
    for i in 1..=n {
        let s = cell_of(i, n, k);
        for j in 1..=n {
            sums[(s, cell_of(j, n, k))] += fine.values[(i, j)];
        }
    }
    let cell_counts = cell_count_grid(n, k);
    let mut cells = sums;
    for (c, &m) in cells.as_mut_slice().iter_mut().zip(cell_counts.as_slice()) {
        *c /= m as f64;
    }
    Ok(QSurface {
        n,
        k,
        cells,
        cell_counts,
    })
}
