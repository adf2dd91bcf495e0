//! The Curie-Weiss model: parameters, the magnetization fixed point, limiting
//! variances, beta parameters, and the exact law of the positive-spin count.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::quad::adaptive_simpson;
use crate::specfn::log_binomial;

/// Phase of the model at `(beta, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `beta < 1`, `h = 0`.
    Subcritical,
    /// `beta > 1`, `h = 0`.
    Supercritical,
    /// `h != 0`.
    Field,
    /// `beta = 1`, `h = 0`.
    Critical,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Supercritical => "supercritical",
            Regime::Field => "field",
            Regime::Critical => "critical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inverse temperature and external field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    beta: f64,
    h: f64,
}

impl ModelParams {
    pub fn new(beta: f64, h: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::domain(format!("beta must be positive and finite, got {beta}")));
        }
        if !h.is_finite() {
            return Err(Error::domain(format!("h must be finite, got {h}")));
        }
        Ok(ModelParams { beta, h })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn regime(&self) -> Regime {
        if self.h != 0.0 {
            Regime::Field
        } else if self.beta < 1.0 {
            Regime::Subcritical
        } else if self.beta > 1.0 {
            Regime::Supercritical
        } else {
            Regime::Critical
        }
    }

    pub fn is_critical(&self) -> bool {
        self.regime() == Regime::Critical
    }

    pub(crate) fn require_noncritical(&self) -> Result<()> {
        if self.is_critical() {
            Err(Error::CriticalPoint {
                beta: self.beta,
                h: self.h,
            })
        } else {
            Ok(())
        }
    }
}

/// Which root of `z = tanh(beta z + h)` a [`Magnetization`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Unique,
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Magnetization {
    pub m: f64,
    /// Limiting variance of `sqrt(N) (m_N - m)`.
    pub v2: f64,
    pub branch: Branch,
}

impl Magnetization {
    /// The other branch of the supercritical pair; a no-op for a unique root.
    pub fn flipped(&self) -> Self {
        match self.branch {
            Branch::Unique => *self,
            Branch::Positive => Magnetization {
                m: -self.m,
                branch: Branch::Negative,
                ..*self
            },
            Branch::Negative => Magnetization {
                m: -self.m,
                branch: Branch::Positive,
                ..*self
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPair {
    pub gamma1: f64,
    pub gamma2: f64,
}

const BISECTION_ITERS: usize = 200;
const BISECTION_TOL: f64 = 1e-14;
const BRACKET_NUDGE: f64 = 1e-15;

/// Largest-in-absolute-value root of `z = tanh(beta z + h)`; the positive one
/// when `h = 0` and `beta > 1`.
///
/// Defined at the critical point as well, where it is zero.
pub fn magnetization(params: &ModelParams) -> Result<f64> {
    let (beta, h) = (params.beta(), params.h());
    if h < 0.0 {
        return magnetization(&ModelParams::new(beta, -h)?).map(|m| -m);
    }
    if h == 0.0 && beta <= 1.0 {
        return Ok(0.0);
    }
    let g = |z: f64| z - (beta * z + h).tanh();
    let mut lo = h.tanh().max(0.0) + BRACKET_NUDGE;
    let mut hi = 1.0 - BRACKET_NUDGE;
    if g(lo) >= 0.0 {
        // only reachable when tanh(h) is within rounding of the root itself
        return Ok(lo);
    }
    if g(hi) <= 0.0 {
        return Err(Error::domain(format!(
            "magnetization saturates at 1 in double precision for beta = {beta}, h = {h}"
        )));
    }
    for _ in 0..BISECTION_ITERS {
        if hi - lo <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn one_minus_sq(m: f64) -> f64 {
    (1.0 - m) * (1.0 + m)
}

/// Magnetization together with its limiting variance.
pub fn solve_magnetization(params: &ModelParams) -> Result<Magnetization> {
    params.require_noncritical()?;
    let m = magnetization(params)?;
    let branch = match params.regime() {
        Regime::Supercritical => Branch::Positive,
        _ => Branch::Unique,
    };
    let q = one_minus_sq(m);
    Ok(Magnetization {
        m,
        v2: q / (1.0 - params.beta() * q),
        branch,
    })
}

/// `(1 - m^2) / (1 - beta (1 - m^2))`.
pub fn limit_variance(params: &ModelParams) -> Result<f64> {
    solve_magnetization(params).map(|s| s.v2)
}

/// Beta parameters (per spin) of the beta-binomial approximant of the spin count.
pub fn gamma_pair(params: &ModelParams) -> Result<GammaPair> {
    params.require_noncritical()?;
    let m = magnetization(params)?;
    let beta = params.beta();
    let num = 1.0 - beta * one_minus_sq(m);
    Ok(GammaPair {
        gamma1: num / (2.0 * beta * (1.0 - m)),
        gamma2: num / (2.0 * beta * (1.0 + m)),
    })
}

fn spin_count_log_weights(n: u64, params: &ModelParams) -> Vec<f64> {
    let nf = n as f64;
    let (beta, h) = (params.beta(), params.h());
    (0..=n as i64)
        .map(|l| {
            let s = (2 * l - n as i64) as f64;
            log_binomial(n, l) + beta * s * s / (2.0 * nf) + h * s
        })
        .collect()
}

/// Exact law of the number of positive spins among all `n` spins.
pub fn exact_spin_count_pmf(n: u64, params: &ModelParams) -> Result<Pmf> {
    if n == 0 {
        return Err(Error::domain("number of spins must be at least 1"));
    }
    Pmf::from_log_weights(0, spin_count_log_weights(n, params))
}

/// `ln Z_N(beta, h)`, summed exactly over the spin count.
pub fn log_partition_exact(n: u64, params: &ModelParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("number of spins must be at least 1"));
    }
    Pmf::normalize_log_weights(0, spin_count_log_weights(n, params)).map(|(_, z)| z)
}

/// `((1+x) ln(1+x) + (1-x) ln(1-x)) / 2` on `[-1, 1]`.
pub fn entropy(x: f64) -> f64 {
    fn xlogx(t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            t * t.ln()
        }
    }
    0.5 * (xlogx(1.0 + x) + xlogx(1.0 - x))
}

/// Large-`N` approximation of `ln Z_N(beta, 0)` for `beta > 1`.
pub fn log_partition_asymptotic(n: u64, beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(Error::domain(format!(
            "partition asymptotics need beta > 1, got {beta}"
        )));
    }
    let sol = solve_magnetization(&ModelParams::new(beta, 0.0)?)?;
    let m = sol.m;
    let nf = n as f64;
    Ok((2.0 * sol.v2.sqrt() / one_minus_sq(m).sqrt()).ln() + nf * std::f64::consts::LN_2
        - nf * (entropy(m) - beta * m * m / 2.0))
}

const CRITICAL_HALF_WIDTH: f64 = 12.0;

/// `∫ exp(-y^4 / 12) dy` over the real line.
pub fn critical_normalizer() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        2.0 * adaptive_simpson(|y| (-y.powi(4) / 12.0).exp(), 0.0, CRITICAL_HALF_WIDTH, 1e-13)
    })
}

/// Limiting density of `N^{1/4} m_N` at `(beta, h) = (1, 0)`.
pub fn critical_density(x: f64) -> f64 {
    (-x.powi(4) / 12.0).exp() / critical_normalizer()
}

/// Distribution function of [`critical_density`].
pub fn critical_cdf(x: f64) -> f64 {
    let t = x.abs().min(CRITICAL_HALF_WIDTH);
    let half = adaptive_simpson(critical_density, 0.0, t, 1e-13);
    if x >= 0.0 {
        (0.5 + half).min(1.0)
    } else {
        (0.5 - half).max(0.0)
    }
}
