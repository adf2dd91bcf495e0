//! Integer-supported probability mass functions stored in log-space.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfn::{log_sum_exp, LogValue};

/// A pmf on the contiguous range `offset ..= offset + log_p.len() - 1`.
///
/// Points inside the range with zero mass carry `-inf`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    offset: i64,
    log_p: Vec<LogValue>,
    normalized: bool,
}

impl Pmf {
    /// Normalizes unnormalized log weights, returning the pmf and the log normalizer.
    pub fn normalize_log_weights(offset: i64, mut log_w: Vec<LogValue>) -> Result<(Self, f64)> {
        let log_z = log_sum_exp(&log_w);
        if !log_z.is_finite() {
            return Err(Error::domain(format!(
                "cannot normalize weights with log total {log_z}"
            )));
        }
        for w in &mut log_w {
            *w -= log_z;
        }
        Ok((
            Pmf {
                offset,
                log_p: log_w,
                normalized: true,
            },
            log_z,
        ))
    }

    pub fn from_log_weights(offset: i64, log_w: Vec<LogValue>) -> Result<Self> {
        Self::normalize_log_weights(offset, log_w).map(|(p, _)| p)
    }

    /// Wraps log-probabilities that are already normalized, checking the total mass.
    pub fn from_log_probs(offset: i64, log_p: Vec<LogValue>) -> Result<Self> {
        let pmf = Pmf {
            offset,
            log_p,
            normalized: false,
        };
        if (pmf.total_mass() - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized);
        }
        Ok(Pmf {
            normalized: true,
            ..pmf
        })
    }

    /// Stores log weights as given, without normalizing.
    pub fn unnormalized(offset: i64, log_w: Vec<LogValue>) -> Self {
        Pmf {
            offset,
            log_p: log_w,
            normalized: false,
        }
    }

    pub fn point_mass(at: i64) -> Self {
        Pmf {
            offset: at,
            log_p: vec![0.0],
            normalized: true,
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.log_p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_p.is_empty()
    }

    /// Last point of the stored range.
    pub fn last(&self) -> i64 {
        self.offset + self.log_p.len() as i64 - 1
    }

    pub fn support(&self) -> RangeInclusive<i64> {
        self.offset..=self.last()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn log_probs(&self) -> &[LogValue] {
        &self.log_p
    }

    pub fn log_prob(&self, at: i64) -> LogValue {
        if at < self.offset || at > self.last() {
            return f64::NEG_INFINITY;
        }
        self.log_p[(at - self.offset) as usize]
    }

    pub fn prob(&self, at: i64) -> f64 {
        self.log_prob(at).exp()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_p.iter().map(|v| v.exp()).collect()
    }

    /// `(point, probability)` pairs over the stored range.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.log_p
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.offset + i as i64, v.exp()))
    }

    pub fn total_mass(&self) -> f64 {
        self.log_p.iter().map(|v| v.exp()).sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(l, p)| l as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.iter()
            .map(|(l, p)| {
                let d = l as f64 - mean;
                d * d * p
            })
            .sum()
    }

    /// Same distribution stored on `lo ..= hi`, which must cover the current range.
    pub fn embed(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo > self.offset || hi < self.last() {
            return Err(Error::domain(format!(
                "range {lo}..={hi} does not cover support {}..={}",
                self.offset,
                self.last()
            )));
        }
        let log_p = (lo..=hi).map(|l| self.log_prob(l)).collect();
        Ok(Pmf {
            offset: lo,
            log_p,
            normalized: self.normalized,
        })
    }

    /// Point-reflected pmf `l -> about - l`.
    pub fn reflect(&self, about: i64) -> Self {
        let mut log_p = self.log_p.clone();
        log_p.reverse();
        Pmf {
            offset: about - self.last(),
            log_p,
            normalized: self.normalized,
        }
    }

    /// Convex combination `Σ w_i P_i` over the union of the component ranges.
    pub fn mixture(weights: &[f64], parts: &[Pmf]) -> Result<Self> {
        if weights.len() != parts.len() || parts.is_empty() {
            return Err(Error::domain("mixture needs one weight per component"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::domain("mixture weights must lie on the simplex"));
        }
        let lo = parts.iter().map(Pmf::offset).min().unwrap_or(0);
        let hi = parts.iter().map(Pmf::last).max().unwrap_or(0);
        let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
        let mut terms = Vec::with_capacity(parts.len());
        let log_p = (lo..=hi)
            .map(|l| {
                terms.clear();
                terms.extend(parts.iter().zip(&log_w).map(|(p, w)| w + p.log_prob(l)));
                log_sum_exp(&terms)
            })
            .collect();
        Ok(Pmf {
            offset: lo,
            log_p,
            normalized: parts.iter().all(Pmf::is_normalized),
        })
    }
}
