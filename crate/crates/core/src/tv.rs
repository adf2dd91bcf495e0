//! Total-variation distances: between pmfs, between centred Gaussians, and
//! the limit predicted for sequences with matched Gaussian-mixture local limits.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::quad::adaptive_simpson;
use crate::specfn::gaussian_pdf;

/// `½ Σ |P(l) - Q(l)|` over the union of both supports.
pub fn tv_discrete(p: &Pmf, q: &Pmf) -> Result<f64> {
    if !p.is_normalized() || !q.is_normalized() {
        return Err(Error::Unnormalized);
    }
    let lo = p.offset().min(q.offset());
    let hi = p.last().max(q.last());
    let sum: f64 = (lo..=hi).map(|l| (p.prob(l) - q.prob(l)).abs()).sum();
    Ok((0.5 * sum).min(1.0))
}

fn check_variances(v1sq: f64, v2sq: f64) -> Result<()> {
    if !(v1sq > 0.0 && v2sq > 0.0) || !v1sq.is_finite() || !v2sq.is_finite() {
        return Err(Error::domain(format!(
            "variances must be positive and finite, got ({v1sq}, {v2sq})"
        )));
    }
    Ok(())
}

/// Total variation between `N(0, v1sq)` and `N(0, v2sq)` in closed form.
///
/// The densities cross at `±t*` with `t*² = s1² s2² ln(s1²/s2²) / (s1² - s2²)`;
/// the narrower one dominates on `|t| < t*`, so the distance is the difference
/// of the two masses of that interval.
pub fn gaussian_tv(v1sq: f64, v2sq: f64) -> Result<f64> {
    check_variances(v1sq, v2sq)?;
    if v1sq == v2sq {
        return Ok(0.0);
    }
    let (wide, narrow) = if v1sq > v2sq { (v1sq, v2sq) } else { (v2sq, v1sq) };
    let diff = wide - narrow;
    let t_sq = wide * narrow * (diff / narrow).ln_1p() / diff;
    let t = t_sq.sqrt();
    let mass = |var: f64| libm::erf(t / (var.sqrt() * SQRT_2));
    Ok((mass(narrow) - mass(wide)).max(0.0))
}

/// `½ ∫ |φ(t; 0, v1sq) - φ(t; 0, v2sq)| dt` by adaptive Simpson over twelve
/// standard deviations of the wider Gaussian.
pub fn gaussian_tv_quadrature(v1sq: f64, v2sq: f64) -> Result<f64> {
    check_variances(v1sq, v2sq)?;
    let half_width = 12.0 * v1sq.max(v2sq).sqrt();
    let integrand = |t: f64| {
        (gaussian_pdf(t, 0.0, v1sq).unwrap_or(0.0) - gaussian_pdf(t, 0.0, v2sq).unwrap_or(0.0)).abs()
    };
    Ok(0.5 * adaptive_simpson(integrand, -half_width, half_width, 1e-10))
}

/// `Σ_j p_j D(v1_j², v2_j²)`.
pub fn mixture_tv_limit(weights: &[f64], variance_pairs: &[(f64, f64)]) -> Result<f64> {
    if weights.len() != variance_pairs.len() || weights.is_empty() {
        return Err(Error::domain("need one variance pair per mixture weight"));
    }
    check_simplex(weights)?;
    let mut total = 0.0;
    for (&w, &(a, b)) in weights.iter().zip(variance_pairs) {
        let d = gaussian_tv(a, b)?;
        if w > 0.0 {
            total += w * d;
        }
    }
    Ok(total)
}

fn check_simplex(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::domain("weights must be nonnegative and sum to 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Finite Gaussian mixture, the shape of a local limit target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianMixture {
    components: Vec<GaussianComponent>,
}

impl GaussianMixture {
    pub fn new(components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("mixture needs at least one component"));
        }
        if components.iter().any(|c| !(c.weight > 0.0)) {
            return Err(Error::domain("mixture weights must be positive"));
        }
        let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
        check_simplex(&weights)?;
        if components.iter().any(|c| !(c.variance > 0.0) || !c.mean.is_finite()) {
            return Err(Error::domain("mixture components need finite means and positive variances"));
        }
        Ok(GaussianMixture { components })
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn density(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * gaussian_pdf(t, c.mean, c.variance).unwrap_or(0.0))
            .sum()
    }

    /// Same mixture on the lattice scale `N`: means `N·mean`, variances `N·variance`.
    pub fn scaled(&self, n: f64) -> Self {
        GaussianMixture {
            components: self
                .components
                .iter()
                .map(|c| GaussianComponent {
                    weight: c.weight,
                    mean: n * c.mean,
                    variance: n * c.variance,
                })
                .collect(),
        }
    }

    /// Limiting TV between two sequences whose local limits are `self` and
    /// `other`, which must share weights and pairwise distinct means.
    pub fn limit_tv(&self, other: &GaussianMixture) -> Result<f64> {
        if self.components.len() != other.components.len() {
            return Err(Error::domain("mixtures have different numbers of components"));
        }
        for (a, b) in self.components.iter().zip(&other.components) {
            if (a.weight - b.weight).abs() > 1e-12 || a.mean != b.mean {
                return Err(Error::domain("mixtures must share weights and means componentwise"));
            }
        }
        for (i, a) in self.components.iter().enumerate() {
            if self.components[i + 1..].iter().any(|b| b.mean == a.mean) {
                return Err(Error::domain(
                    "component means coincide; no limit prediction for overlapping components",
                ));
            }
        }
        let weights: Vec<f64> = self.components.iter().map(|c| c.weight).collect();
        let pairs: Vec<(f64, f64)> = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a.variance, b.variance))
            .collect();
        mixture_tv_limit(&weights, &pairs)
    }
}
