//! Estimation of Rényi divergences `D_α(p‖q)` where `p` is only observed
//! through i.i.d. samples and the reference `q` is known exactly.
//!
//! The crate provides:
//!
//! - [`dist`]: discrete distributions, sampling (fixed-size and Poissonized),
//!   perturbations and the distribution families used by the lower bounds.
//! - [`divergence`]: exact power sums, divergences and entropies.
//! - [`estimators`]: the plug-in estimator, the falling-power bias-corrected
//!   estimator and median amplification.
//! - [`bounds`]: the sufficient sample-count condition, the lower-bound
//!   constants and the witness constructions.
//! - [`oracle`]: brute-force enumeration of estimator moments and failure
//!   probabilities for small instances.
//! - [`experiment`], [`monitor`], [`verify`]: the machinery behind the CLI.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dist;
pub mod divergence;
mod error;
pub mod estimators;
pub mod experiment;
pub mod monitor;
pub mod numeric;
pub mod oracle;
mod par;
pub mod verify;

pub use bounds::{BoundReport, LowerBoundConstants, SpikeWitness, WitnessPair};
pub use dist::{Distribution, Family, PerturbationVector};
pub use divergence::{DivergenceOrder, PowerSum};
pub use error::{Error, Result};
pub use estimators::{Estimate, EstimatorConfig, Histogram, HistogramSampler, Method, Normalization};
