use rand::seq::SliceRandom;

use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Paired real observations `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pairs: Vec<(f64, f64)>,
}

impl Sample {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::InvalidSample(format!(
                "need at least 2 observations, got {}",
                pairs.len()
            )));
        }
        if let Some(i) = pairs.iter().position(|(x, y)| !x.is_finite() || !y.is_finite()) {
            let (x, y) = pairs[i];
            return Err(Error::InvalidSample(format!(
                "observation {} is not finite: ({x}, {y})",
                i + 1
            )));
        }
        Ok(Sample { pairs })
    }

    pub fn from_columns(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidSample(format!(
                "column lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        Sample::new(x.iter().copied().zip(y.iter().copied()).collect())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn xs(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

/// Ranks of both coordinates; each vector is a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPairs {
    r: Vec<usize>,
    s: Vec<usize>,
    tie_broken: bool,
}

impl RankPairs {
    /// Validates that both vectors are permutations of `1..=n`.
    pub fn new(r: Vec<usize>, s: Vec<usize>) -> Result<Self> {
        if r.len() != s.len() || r.len() < 2 {
            return Err(Error::arg("rank vectors must have equal length >= 2"));
        }
        if !is_permutation(&r) || !is_permutation(&s) {
            return Err(Error::arg("rank vectors must be permutations of 1..=n"));
        }
        Ok(RankPairs {
            r,
            s,
            tie_broken: false,
        })
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    pub fn s(&self) -> &[usize] {
        &self.s
    }

    pub fn tie_broken(&self) -> bool {
        self.tie_broken
    }

    /// The y-rank of the observation holding x-rank `i + 1`, for each `i`.
    pub fn y_by_x_rank(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for (&ri, &si) in self.r.iter().zip(&self.s) {
            out[ri - 1] = si;
        }
        out
    }
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&x| {
        (1..=v.len()).contains(&x) && !std::mem::replace(&mut seen[x - 1], true)
    })
}

/// Ranks `values` in ascending order. Tied values receive their block of ranks
/// in an order drawn uniformly at random from `rng`. Returns whether any tie
/// was present.
fn rank_column(values: &[f64], rng: &mut impl rand::Rng) -> (Vec<usize>, bool) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0; n];
    let mut tied = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        // -0.0 and 0.0 compare equal here, unlike under total_cmp.
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            tied = true;
            order[start..end].shuffle(rng);
        }
        start = end;
    }
    for (rank, &idx) in order.iter().enumerate() {
        ranks[idx] = rank + 1;
    }
    (ranks, tied)
}

/// Ranks both coordinates of `sample`. Ties are broken by a seeded uniform
/// permutation among the tied entries so the result stays a permutation.
pub fn compute_ranks(sample: &Sample, seed: u64) -> RankPairs {
    let mut rng = rng_from_seed(seed);
    let (r, tx) = rank_column(&sample.xs(), &mut rng);
    let (s, ty) = rank_column(&sample.ys(), &mut rng);
    RankPairs {
        r,
        s,
        tie_broken: tx || ty,
    }
}
