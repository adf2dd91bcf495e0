use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// `(beta, h) = (1, 0)`: the limiting variance and the beta parameters are undefined there.
    #[error("critical point (beta = {beta}, h = {h}) has no finite limiting variance")]
    CriticalPoint { beta: f64, h: f64 },

    #[error("{0}")]
    Domain(String),

    /// The mixing law would need zero or negative spread.
    #[error("variance {sigma_sq} does not exceed a(1 - a) = {floor} for a = {a}")]
    DegenerateVariance { a: f64, sigma_sq: f64, floor: f64 },

    #[error("operation requires the {required} regime, got {actual}")]
    Regime {
        required: &'static str,
        actual: &'static str,
    },

    #[error("pmf is not normalized")]
    Unnormalized,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable name of the error variant, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CriticalPoint { .. } => "CriticalPoint",
            Error::Domain(_) => "DomainError",
            Error::DegenerateVariance { .. } => "DegenerateVariance",
            Error::Regime { .. } => "RegimeError",
            Error::Unnormalized => "Unnormalized",
            Error::Io { .. } => "IoError",
        }
    }
}
