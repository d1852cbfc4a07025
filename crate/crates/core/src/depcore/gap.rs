use super::hypergeom::HypergeomParams;
use super::normal::normal_cdf;
use crate::{Error, Result};

/// Largest distance between the exact law of `C_n(u, v) − uv` under
/// independence and its normal approximation `Φ(√(n/d_n) · x)`, with
/// `d_n = p_n(1−p_n) f_n(1−f_n)`, `p_n = ⌊nv⌋/n`, `f_n = ⌊nu⌋/n`.
///
/// The supremum is attained at a jump of the step function, so both one-sided
/// limits are checked at each support point.
pub fn normal_approx_gap(n: u64, u: f64, v: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::arg(format!("normal_approx_gap needs n >= 2, got {n}")));
    }
    if !(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0) {
        return Err(Error::arg(format!("({u}, {v}) must lie in the open unit square")));
    }
    let params = HypergeomParams::at_point(n, u, v)?;
    if params.m() == 0 || params.m() == n || params.l() == 0 || params.l() == n {
        return Err(Error::arg(format!(
            "degenerate point: floor(nu) = {}, floor(nv) = {} with n = {n}",
            params.m(),
            params.l()
        )));
    }
    let mut cdf = params.pmf_over_support();
    let mut acc = 0.0;
    for p in cdf.iter_mut() {
        acc += *p;
        *p = acc;
    }
    Ok(sup_gap(n, u, v, params.support_min(), &cdf))
}

/// `cdf[i]` is `P(n C_n ≤ lo + i)`.
pub(crate) fn sup_gap(n: u64, u: f64, v: f64, lo: u64, cdf: &[f64]) -> f64 {
    let nf = n as f64;
    let f_n = (nf * u).floor() / nf;
    let p_n = (nf * v).floor() / nf;
    let d_n = p_n * (1.0 - p_n) * f_n * (1.0 - f_n);
    let scale = (nf / d_n).sqrt();
    let mut left = 0.0;
    let mut sup: f64 = 0.0;
    for (i, &right) in cdf.iter().enumerate() {
        let x = (lo + i as u64) as f64 / nf - u * v;
        let phi = normal_cdf(scale * x);
        sup = sup.max((left - phi).abs()).max((right - phi).abs());
        left = right;
    }
    sup
}
