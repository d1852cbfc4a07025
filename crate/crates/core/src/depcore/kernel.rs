//! Interchangeable routines that map a rank permutation to the coarse `q̂_n`
//! surface.
//!
//! [`DirectKernel`] materialises the copula counts and the fine surface and
//! then averages, costing `O(n²)` per surface. [`BlockedKernel`] never builds
//! the fine lattice: because `q_n(i, j)` separates into
//! `(count_ij / n − ij / n²) · a_i · a_j` with `a_i = 1/√(u_i(1−u_i))`, the
//! cell sums only need running per-column-block sums of `a_j · count_ij`,
//! which change by a block-constant amount per row. That costs `O(n·k)` and
//! is what calibration uses by default. The two agree to rounding error.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::sample::RankPairs;
use super::surface::{cell_of, cell_sizes, check_k, coarsen, copula_grid, fine_q_surface, QSurface};
use crate::{Error, Result};

pub trait SurfaceKernel: Send + Sync {
    fn name(&self) -> &'static str;

    fn prepare(&self, n: usize, k: usize) -> Result<Box<dyn PreparedKernel>>;
}

/// A kernel bound to a fixed `(n, k)`.
pub trait PreparedKernel: Send + Sync {
    fn n(&self) -> usize;

    fn k(&self) -> usize;

    /// Writes the `k × k` cell means (row-major, x-cell first) for the pairing
    /// in which x-rank `i + 1` carries y-rank `y_by_x[i]`.
    fn cells_into(&self, y_by_x: &[usize], out: &mut [f64]);

    fn surface(&self, y_by_x: &[usize]) -> QSurface {
        let k = self.k();
        let mut cells = vec![0.0; k * k];
        self.cells_into(y_by_x, &mut cells);
        QSurface::from_parts(self.n(), k, cells)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct DirectKernel;

struct PreparedDirect {
    n: usize,
    k: usize,
}

impl SurfaceKernel for DirectKernel {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn prepare(&self, n: usize, k: usize) -> Result<Box<dyn PreparedKernel>> {
        check_k(n, k)?;
        Ok(Box::new(PreparedDirect { n, k }))
    }
}

impl PreparedKernel for PreparedDirect {
    fn n(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.k
    }

    fn cells_into(&self, y_by_x: &[usize], out: &mut [f64]) {
        let ranks = RankPairs::new((1..=self.n).collect(), y_by_x.to_vec())
            .expect("y_by_x must be a permutation of 1..=n");
        let q = coarsen(&fine_q_surface(&copula_grid(&ranks)), self.k).expect("k validated");
        out.copy_from_slice(q.cells().as_slice());
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct BlockedKernel;

struct PreparedBlocked {
    n: usize,
    k: usize,
    /// zero-based cell of lattice index `i`, at position `i - 1`
    cell: Vec<usize>,
    /// `a_i`, zero at `i = n`
    weight: Vec<f64>,
    /// within-block suffix sums of `weight`
    suffix: Vec<f64>,
    block_total: Vec<f64>,
    /// `Σ_{i ∈ block} (i/n) a_i`
    block_mean_term: Vec<f64>,
    /// `1 / (|I_s| |J_t|)`
    inv_count: Vec<f64>,
}

impl SurfaceKernel for BlockedKernel {
    fn name(&self) -> &'static str {
        "blocked"
    }

    fn prepare(&self, n: usize, k: usize) -> Result<Box<dyn PreparedKernel>> {
        check_k(n, k)?;
        let nf = n as f64;
        let cell: Vec<usize> = (1..=n).map(|i| cell_of(i, n, k)).collect();
        let weight: Vec<f64> = (1..=n)
            .map(|i| {
                if i == n {
                    0.0
                } else {
                    let u = i as f64 / nf;
                    1.0 / (u * (1.0 - u)).sqrt()
                }
            })
            .collect();
        let mut suffix = vec![0.0; n];
        let mut acc = 0.0;
        for idx in (0..n).rev() {
            if idx + 1 == n || cell[idx + 1] != cell[idx] {
                acc = 0.0;
            }
            acc += weight[idx];
            suffix[idx] = acc;
        }
        let mut block_total = vec![0.0; k];
        let mut block_mean_term = vec![0.0; k];
        for idx in 0..n {
            block_total[cell[idx]] += weight[idx];
            block_mean_term[cell[idx]] += (idx + 1) as f64 / nf * weight[idx];
        }
        let sizes = cell_sizes(n, k);
        let mut inv_count = vec![0.0; k * k];
        for s in 0..k {
            for t in 0..k {
                inv_count[s * k + t] = 1.0 / (sizes[s] * sizes[t]) as f64;
            }
        }
        Ok(Box::new(PreparedBlocked {
            n,
            k,
            cell,
            weight,
            suffix,
            block_total,
            block_mean_term,
            inv_count,
        }))
    }
}

impl PreparedKernel for PreparedBlocked {
    fn n(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.k
    }

    fn cells_into(&self, y_by_x: &[usize], out: &mut [f64]) {
        let (n, k) = (self.n, self.k);
        debug_assert_eq!(y_by_x.len(), n);
        debug_assert_eq!(out.len(), k * k);
        // running[t] = Σ_{j ∈ J_t} a_j · count(i, j) for the current row i
        let mut running = vec![0.0; k];
        out.fill(0.0);
        for (idx, &y) in y_by_x.iter().enumerate() {
            let b = self.cell[y - 1];
            running[b] += self.suffix[y - 1];
            for (r, &tot) in running[b + 1..].iter_mut().zip(&self.block_total[b + 1..]) {
                *r += tot;
            }
            let a = self.weight[idx];
            if a != 0.0 {
                let row = &mut out[self.cell[idx] * k..(self.cell[idx] + 1) * k];
                for (o, &r) in row.iter_mut().zip(&running) {
                    *o += a * r;
                }
            }
        }
        let nf = n as f64;
        for s in 0..k {
            for t in 0..k {
                let c = s * k + t;
                out[c] = (out[c] / nf - self.block_mean_term[s] * self.block_mean_term[t]) * self.inv_count[c];
            }
        }
    }
}

/// Named collection of surface kernels.
#[derive(Clone)]
pub struct KernelRegistry {
    kernels: BTreeMap<String, Arc<dyn SurfaceKernel>>,
}

impl KernelRegistry {
    pub const DEFAULT: &'static str = "blocked";

    pub fn empty() -> Self {
        KernelRegistry {
            kernels: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, kernel: Arc<dyn SurfaceKernel>) {
        self.kernels.insert(kernel.name().to_string(), kernel);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn SurfaceKernel>> {
        self.kernels.get(name).cloned().ok_or_else(|| Error::Unknown {
            kind: "kernel",
            name: name.to_string(),
            options: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.kernels.keys().map(String::as_str).collect()
    }
}

impl Default for KernelRegistry {
    fn default() -> Self {
        let mut reg = KernelRegistry::empty();
        reg.register(Arc::new(DirectKernel));
        reg.register(Arc::new(BlockedKernel));
        reg
    }
}
