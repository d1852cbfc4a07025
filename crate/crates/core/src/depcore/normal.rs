//! Standard normal distribution.
//!
//! The centre uses the Taylor series `Φ(x) = ½ + φ(x) Σ x^{2k+1}/(2k+1)!!`;
//! beyond `|x| = 3` the tail `1 − Φ(x)` comes from its continued fraction so
//! it keeps full relative precision far into the tail.

use crate::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;
const TAIL_SWITCH: f64 = 3.0;

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

fn central_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    while term.abs() > 1e-17 * sum.abs() {
        k += 2.0;
        term *= x2 / k;
        sum += term;
    }
    normal_pdf(x) * sum
}

/// `1 − Φ(x)` for `x ≥ TAIL_SWITCH`, by modified Lentz evaluation of
/// `φ(x) / (x + 1/(x + 2/(x + 3/(x + …))))`.
fn upper_tail_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for j in 1..10_000 {
        let a = j as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    normal_pdf(x) / f
}

/// Upper tail `1 − Φ(x)`, accurate in relative terms for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= TAIL_SWITCH {
        upper_tail_cf(x)
    } else if x <= -TAIL_SWITCH {
        1.0 - upper_tail_cf(-x)
    } else {
        0.5 - central_series(x)
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    normal_sf(-x)
}

/// Inverse of [`normal_cdf`]; `p` must lie strictly inside `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::arg(format!("normal quantile needs 0 < p < 1, got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve Q(z) = q for z > 0 with q the smaller tail; 1 − p is exact for p ≥ ½.
    let (q, sign) = if p < 0.5 { (p, -1.0) } else { (1.0 - p, 1.0) };
    let t = (-2.0 * q.ln()).sqrt();
    let mut z = t - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
        / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t);
    // Newton on ln Q(z) − ln q; ln Q is concave so the iterates approach the
    // root monotonically after the first step.
    let ln_q = q.ln();
    for _ in 0..100 {
        let tail = normal_sf(z);
        let step = (tail.ln() - ln_q) * tail / normal_pdf(z);
        z += step;
        if step.abs() <= 1e-15 * z.abs().max(1.0) {
            break;
        }
    }
    Ok(sign * z)
}
