//! Collaborative on-vehicle content stashing.
//!
//! The crate is split along the lines of the system it models:
//!
//! - [`workload`] builds a Zipf-popular content catalog with Gamma-distributed
//!   sizes and draws request traces with exponential view ratios.
//! - [`analytics`] computes request-set overlap (Jaccard) and the normalized
//!   source entropy used to check spatio-temporal correlation of requests.
//! - [`model`] is the closed-form cost / completion-time model together with
//!   the optimal split ratio and the combined `H` objective.
//! - [`sim`] replays a trace against an on-board stash, executing the
//!   collaborative split and push-back rules request by request.
//!
//! All bandwidths are MB/s, sizes MB, costs cents/MB and times seconds; see
//! [`units`] for the conversions accepted at the configuration boundary.

pub mod analytics;
pub mod error;
pub mod model;
pub mod sim;
pub mod units;
pub mod workload;

pub use error::{Error, Result};
