//! Binomial, hypergeometric and beta-binomial laws, mixtures of them, and the
//! exact law of the positive-spin count among `k` of `N` spins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{exact_spin_count_pmf, ModelParams};
use crate::pmf::Pmf;
use crate::specfn::{log_beta, log_binomial, log_sum_exp};

/// Law of the success probability of a mixed binomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingLaw {
    Point(f64),
    Beta { a: f64, b: f64 },
    /// Convex combination of point and beta laws.
    Finite(Vec<(f64, MixingLaw)>),
}

impl MixingLaw {
    pub fn point(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("success probability {p} outside [0, 1]")));
        }
        Ok(MixingLaw::Point(p))
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("beta parameters must be positive, got ({a}, {b})")));
        }
        Ok(MixingLaw::Beta { a, b })
    }

    pub fn finite(weights: &[f64], components: Vec<MixingLaw>) -> Result<Self> {
        if weights.len() != components.len() || weights.is_empty() {
            return Err(Error::domain("finite mixing law needs one weight per component"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::domain("mixing weights must lie on the simplex"));
        }
        if components.iter().any(|c| matches!(c, MixingLaw::Finite(_))) {
            return Err(Error::domain("finite mixing laws cannot be nested"));
        }
        Ok(MixingLaw::Finite(weights.iter().copied().zip(components).collect()))
    }

    /// Mean success probability.
    pub fn mean(&self) -> f64 {
        match self {
            MixingLaw::Point(p) => *p,
            MixingLaw::Beta { a, b } => a / (a + b),
            MixingLaw::Finite(parts) => parts.iter().map(|(w, c)| w * c.mean()).sum(),
        }
    }
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

pub fn binomial_pmf(n: u64, p: f64) -> Result<Pmf> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("success probability {p} outside [0, 1]")));
    }
    let log_p = (0..=n as i64)
        .map(|j| {
            let j_f = j as f64;
            log_binomial(n, j) + xlogy(j_f, p) + xlogy(n as f64 - j_f, 1.0 - p)
        })
        .collect();
    Pmf::from_log_probs(0, log_p)
}

fn check_hypergeometric(n: u64, i: u64, k: u64) -> Result<()> {
    if i > n || k > n {
        return Err(Error::domain(format!(
            "hypergeometric parameters need i <= n and k <= n, got n = {n}, i = {i}, k = {k}"
        )));
    }
    Ok(())
}

/// Number of marked items in a sample of `k` drawn without replacement from
/// `n` items of which `i` are marked, stored on `0 ..= k`.
pub fn hypergeometric_pmf(n: u64, i: u64, k: u64) -> Result<Pmf> {
    check_hypergeometric(n, i, k)?;
    let norm = log_binomial(n, k as i64);
    let log_p = (0..=k as i64)
        .map(|j| log_binomial(i, j) + log_binomial(n - i, k as i64 - j) - norm)
        .collect();
    Pmf::from_log_probs(0, log_p)
}

/// Binomial `k` trials with a `Beta(a, b)` success probability, term by term.
pub fn beta_binomial_pmf(k: u64, a: f64, b: f64) -> Result<Pmf> {
    let norm = log_beta(a, b)?;
    let log_p = (0..=k as i64)
        .map(|l| {
            let lf = l as f64;
            Ok(log_binomial(k, l) + log_beta(lf + a, (k as i64 - l) as f64 + b)? - norm)
        })
        .collect::<Result<Vec<_>>>()?;
    Pmf::from_log_probs(0, log_p)
}

/// `Bin(k, law)`.
pub fn mixed_binomial_pmf(k: u64, law: &MixingLaw) -> Result<Pmf> {
    match law {
        MixingLaw::Point(p) => binomial_pmf(k, *p),
        MixingLaw::Beta { a, b } => beta_binomial_pmf(k, *a, *b),
        MixingLaw::Finite(parts) => {
            let weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
            let pmfs = parts
                .iter()
                .map(|(_, c)| mixed_binomial_pmf(k, c))
                .collect::<Result<Vec<_>>>()?;
            Pmf::mixture(&weights, &pmfs)?.embed(0, k as i64)
        }
    }
}

/// `HyperG(n, weights, k)`: the number of marked items in a sample of `k`
/// when the number of marked items among `n` is drawn from `weights`.
///
/// Every mixing index is summed exactly; the output points are computed
/// independently of each other, so the result does not depend on the thread count.
pub fn hypergeometric_mixture(n: u64, weights: &Pmf, k: u64) -> Result<Pmf> {
    if k > n {
        return Err(Error::domain(format!("sample size {k} exceeds population {n}")));
    }
    if weights.is_empty() || weights.offset() < 0 || weights.last() > n as i64 {
        return Err(Error::domain(format!(
            "mixing weights supported on {}..={} exceed 0..={n}",
            weights.offset(),
            weights.last()
        )));
    }
    if !weights.is_normalized() {
        return Err(Error::Unnormalized);
    }
    // ln x! for x = 0..=n
    let log_fact: Vec<f64> = (0..=n)
        .map(|x| if x < 2 { 0.0 } else { libm::lgamma(x as f64 + 1.0) })
        .collect();
    let lc = |a: u64, b: u64| log_fact[a as usize] - log_fact[b as usize] - log_fact[(a - b) as usize];
    let norm = lc(n, k);
    let lo = weights.offset() as u64;
    let hi = weights.last() as u64;

    let log_p: Vec<f64> = (0..=k)
        .into_par_iter()
        .map(|j| {
            // i ranges over mixing indices with j <= i and k - j <= n - i
            let i_lo = lo.max(j);
            let i_hi = hi.min(n - k + j);
            if i_lo > i_hi {
                return f64::NEG_INFINITY;
            }
            let terms: Vec<f64> = (i_lo..=i_hi)
                .map(|i| weights.log_prob(i as i64) + lc(i, j) + lc(n - i, k - j) - norm)
                .collect();
            log_sum_exp(&terms)
        })
        .collect();
    Pmf::from_log_probs(0, log_p)
}

/// Exact law of the positive-spin count among the first `k` of `n` spins.
pub fn marginal_spin_count_pmf(n: u64, k: u64, params: &ModelParams) -> Result<Pmf> {
    if k == 0 || k > n {
        return Err(Error::domain(format!("marginal size must satisfy 1 <= k <= N, got k = {k}, N = {n}")));
    }
    let full = exact_spin_count_pmf(n, params)?;
    if k == n {
        return Ok(full);
    }
    hypergeometric_mixture(n, &full, k)
}

/// Pólya urn started with `a` white and `b` black balls (real-valued counts).
///
/// Each draw returns the ball together with one more of the same colour; the
/// number of white draws in `k` trials is beta-binomial `(k, a, b)`.
#[derive(Debug, Clone)]
pub struct PolyaUrn {
    a: f64,
    b: f64,
    rng: ChaCha8Rng,
}

impl PolyaUrn {
    pub fn new(a: f64, b: f64, seed: u64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("urn contents must be positive, got ({a}, {b})")));
        }
        Ok(PolyaUrn {
            a,
            b,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Runs `k` trials from the initial urn and counts the white draws.
    pub fn draw(&mut self, k: u64) -> u64 {
        let (mut white, mut black) = (self.a, self.b);
        let mut count = 0;
        for _ in 0..k {
            if self.rng.gen::<f64>() * (white + black) < white {
                white += 1.0;
                count += 1;
            } else {
                black += 1.0;
            }
        }
        count
    }

    /// Relative frequencies of `draws` independent runs of `k` trials, on `0 ..= k`.
    pub fn empirical_pmf(&mut self, k: u64, draws: u64) -> Result<Pmf> {
        if draws == 0 {
            return Err(Error::domain("need at least one draw"));
        }
        let mut counts = vec![0u64; k as usize + 1];
        for _ in 0..draws {
            counts[self.draw(k) as usize] += 1;
        }
        let log_w = counts.iter().map(|&c| (c as f64).ln()).collect();
        Pmf::from_log_weights(0, log_w)
    }
}

/// One seeded beta-binomial draw via the urn.
pub fn polya_urn_sampler(k: u64, a: f64, b: f64, seed: u64) -> Result<u64> {
    Ok(PolyaUrn::new(a, b, seed)?.draw(k))
}
