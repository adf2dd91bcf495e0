//! Scalar special functions, all in log-space where it matters.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Natural logarithm of a nonnegative quantity; `-inf` encodes zero.
pub type LogValue = f64;

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// `ln n! - (n + 1/2) ln n + n - ln √(2π)` for integer `n >= 1`.
fn stirling_error(n: u64) -> f64 {
    const SMALL: [f64; 16] = [
        0.0,
        0.08106146679532726,
        0.0413406959554093,
        0.02767792568499834,
        0.020790672103765093,
        0.016644691189821193,
        0.013876128823070748,
        0.01189670994589177,
        0.010411265261972096,
        0.009255462182712733,
        0.00833056343336287,
        0.007573675487951841,
        0.00694284010720953,
        0.006408994188004207,
        0.0059513701127588475,
        0.005554733551962801,
    ];
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < 16 {
        return SMALL[n as usize];
    }
    let x = n as f64;
    let xx = x * x;
    if n > 500 {
        (S0 - S1 / xx) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// `ln C(n, k)`; `-inf` outside `0 <= k <= n`.
///
/// Evaluated as `k ln(n/k) + (n-k) ln(n/(n-k))` plus Stirling corrections, so
/// no large `ln n!` terms cancel; symmetric in `k <-> n - k` bit for bit.
pub fn log_binomial(n: u64, k: i64) -> LogValue {
    if k < 0 || k as u64 > n {
        return f64::NEG_INFINITY;
    }
    let k = k as u64;
    if k == 0 || k == n {
        return 0.0;
    }
    let (lo, hi) = (k.min(n - k), k.max(n - k));
    let (nf, lf, hf) = (n as f64, lo as f64, hi as f64);
    let main = lf * (nf / lf).ln() + hf * (nf / hf).ln();
    let prefactor = 0.5 * (nf / (2.0 * PI * lf * hf)).ln();
    let correction = stirling_error(n) - (stirling_error(lo) + stirling_error(hi));
    main + prefactor + correction
}

/// `ln B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!(
            "log_beta requires positive arguments, got ({a}, {b})"
        )));
    }
    // Sum the two single-argument terms in a fixed order so the result is
    // symmetric in (a, b) bit for bit.
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok(log_gamma(lo)? + log_gamma(hi)? - log_gamma(a + b)?)
}

/// Gaussian density with mean `m` and variance `v2`.
pub fn gaussian_pdf(t: f64, m: f64, v2: f64) -> Result<f64> {
    if !(v2 > 0.0) {
        return Err(Error::domain(format!(
            "gaussian_pdf requires positive variance, got {v2}"
        )));
    }
    let z = t - m;
    Ok((-z * z / (2.0 * v2)).exp() / (2.0 * PI * v2).sqrt())
}

/// Standard normal distribution function.
pub fn std_normal_cdf(t: f64) -> f64 {
    if t == f64::INFINITY {
        return 1.0;
    }
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * libm::erfc(-t / SQRT_2)
}

/// `ln Σ exp(v)`, taken against the maximum term.
pub fn log_sum_exp(values: &[LogValue]) -> LogValue {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + s.ln()
}
