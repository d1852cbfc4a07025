use crate::{Error, Result};

/// Law of `n · C_n(u, v)` under independence: the number of the `m = ⌊nu⌋`
/// smallest x-ranks whose partner is among the `l = ⌊nv⌋` smallest y-ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypergeomParams {
    m: u64,
    l: u64,
    n: u64,
}

impl HypergeomParams {
    pub fn new(m: u64, l: u64, n: u64) -> Result<Self> {
        if m > n || l > n {
            return Err(Error::arg(format!("hypergeometric parameters need m, l <= n (got m={m}, l={l}, n={n})")));
        }
        Ok(HypergeomParams { m, l, n })
    }

    /// Parameters for the point `(u, v)` of an `n`-sample.
    pub fn at_point(n: u64, u: f64, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return Err(Error::arg(format!("point ({u}, {v}) outside the unit square")));
        }
        let nf = n as f64;
        HypergeomParams::new((nf * u).floor() as u64, (nf * v).floor() as u64, n)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn support_min(&self) -> u64 {
        (self.m + self.l).saturating_sub(self.n)
    }

    pub fn support_max(&self) -> u64 {
        self.m.min(self.l)
    }

    /// Probabilities over `support_min..=support_max`, in order.
    ///
    /// Log-probabilities relative to the mode are accumulated from the term
    /// ratios `P(c+1)/P(c) = (m−c)(l−c) / ((c+1)(n−m−l+c+1))`, so no factorial
    /// is ever formed; the terms are normalised at the end. Working relative
    /// to the mode keeps every exponent ≤ 0 and avoids the absolute rounding
    /// of `ln n!`, which at n in the hundreds already exceeds 1e-12.
    pub fn pmf_over_support(&self) -> Vec<f64> {
        let (lo, hi) = (self.support_min(), self.support_max());
        let (m, l, n) = (self.m as f64, self.l as f64, self.n as f64);
        let ln_ratio = |c: u64| {
            let c = c as f64;
            ((m - c) * (l - c)).ln() - ((c + 1.0) * (n - m - l + c + 1.0)).ln()
        };
        let mode = (((m + 1.0) * (l + 1.0) / (n + 2.0)).floor() as u64).clamp(lo, hi);
        let mut ln_terms = vec![0.0; (hi - lo + 1) as usize];
        for c in mode..hi {
            ln_terms[(c + 1 - lo) as usize] = ln_terms[(c - lo) as usize] + ln_ratio(c);
        }
        for c in (lo..mode).rev() {
            ln_terms[(c - lo) as usize] = ln_terms[(c + 1 - lo) as usize] - ln_ratio(c);
        }
        let mut terms: Vec<f64> = ln_terms.into_iter().map(f64::exp).collect();
        let total: f64 = terms.iter().sum();
        for t in &mut terms {
            *t /= total;
        }
        terms
    }
}

/// Exact hypergeometric probability of `count`, zero outside the support.
pub fn hypergeom_pmf(params: &HypergeomParams, count: i64) -> f64 {
    if count < params.support_min() as i64 || count > params.support_max() as i64 {
        return 0.0;
    }
    params.pmf_over_support()[(count - params.support_min() as i64) as usize]
}

/// `P(X ≤ count)`.
pub fn hypergeom_cdf(params: &HypergeomParams, count: i64) -> f64 {
    let lo = params.support_min() as i64;
    if count < lo {
        return 0.0;
    }
    if count >= params.support_max() as i64 {
        return 1.0;
    }
    params.pmf_over_support()[..=(count - lo) as usize].iter().sum::<f64>().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(m: u64, l: u64, n: u64) -> HypergeomParams {
        HypergeomParams::new(m, l, n).unwrap()
    }

    fn choose(a: u64, b: u64) -> f64 {
        (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn two_point_case() {
        let h = p(1, 1, 2);
        assert!((hypergeom_pmf(&h, 0) - 0.5).abs() < 1e-15);
        assert!((hypergeom_pmf(&h, 1) - 0.5).abs() < 1e-15);
        assert!((hypergeom_cdf(&h, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_binomial_coefficients() {
        assert!((hypergeom_pmf(&p(2, 2, 4), 1) - 4.0 / 6.0).abs() < 1e-14);
        let h = p(10, 15, 25);
        for c in 0..=10 {
            let direct = choose(10, c) * choose(15, 15 - c) / choose(25, 15);
            assert!((hypergeom_pmf(&h, c as i64) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_outside_support() {
        let h = p(7, 8, 10);
        assert_eq!(h.support_min(), 5);
        assert_eq!(hypergeom_pmf(&h, 4), 0.0);
        assert_eq!(hypergeom_pmf(&h, 8), 0.0);
        assert_eq!(hypergeom_pmf(&h, -1), 0.0);
        assert_eq!(hypergeom_cdf(&h, 4), 0.0);
        assert_eq!(hypergeom_cdf(&h, 7), 1.0);
        assert_eq!(hypergeom_cdf(&h, 100), 1.0);
    }

    #[test]
    fn large_n_does_not_overflow() {
        let h = p(50_000, 30_000, 100_000);
        let pmf = h.pmf_over_support();
        assert!(pmf.iter().all(|v| v.is_finite()));
        let total: f64 = pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn point_parameters_use_floor() {
        let h = HypergeomParams::at_point(25, 0.4, 0.6).unwrap();
        assert_eq!((h.m(), h.l(), h.n()), (10, 15, 25));
        assert!(HypergeomParams::new(3, 5, 4).is_err());
    }

    proptest! {
        #[test]
        fn pmf_normalises_and_cdf_monotone(n in 1u64..600, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let h = p((n as f64 * a) as u64, (n as f64 * b) as u64, n);
            let total: f64 = h.pmf_over_support().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "total {}", total);
            let mut prev = 0.0;
            for c in h.support_min() as i64 - 1..=h.support_max() as i64 {
                let f = hypergeom_cdf(&h, c);
                prop_assert!(f >= prev);
                prev = f;
            }
            prop_assert!((prev - 1.0).abs() < 1e-12);
        }
    }
}
