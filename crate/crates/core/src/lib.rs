//! Exact finite-N laws of the Curie-Weiss positive-spin count and of its
//! `k`-spin marginals, their binomial and beta-binomial approximants, and the
//! total-variation limits these approach when `k / N → alpha`.
//!
//! Everything is computed exactly over the spin count `0..=N` in log-space;
//! nothing is sampled except by the Pólya urn in [`dist`].
//!
//! ```
//! use cw_chaos::{analysis, model::ModelParams};
//!
//! let params = ModelParams::new(0.5, 0.0).unwrap();
//! let limit = analysis::theorem1_limit(&params, 1.0).unwrap();
//! assert!((limit.sigma_alpha_sq - 0.5).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod dist;
pub mod error;
pub mod model;
pub mod pmf;
pub mod quad;
pub mod specfn;
pub mod tv;

pub use error::{Error, Result};
pub use pmf::Pmf;
