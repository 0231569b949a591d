//! Selective inference for differences between k-means cluster means.
//!
//! Lloyd's algorithm is run with a fixed seed and every intermediate
//! assignment is recorded ([`kmeans::ClusterTrace`]). For a pair of final
//! clusters, the set of perturbation magnitudes that reproduce the whole
//! trace is an intersection of quadratic inequalities in one variable
//! ([`truncation::truncation_set`]). The selective p-value is then the
//! survival function of a scaled chi distribution truncated to that set
//! ([`inference::p_selective`]).
//!
//! Cluster labels are zero-based throughout the library. The command-line
//! front end converts to one-based labels at its boundary.

pub mod contrast;
pub mod covariance;
pub mod data;
pub mod error;
pub mod inference;
pub mod interval;
pub mod kmeans;
pub mod rng;
pub mod simulation;
pub mod special;
pub mod stats;
pub mod truncation;
pub mod variance;

pub use contrast::ContrastContext;
pub use covariance::CovarianceFactors;
pub use data::DataMatrix;
pub use error::{Error, Result};
pub use inference::{SelectiveTestResult, SigmaSource, TruncatedChi};
pub use interval::{Interval, IntervalSet};
pub use kmeans::ClusterTrace;
pub use variance::{SigmaEstimate, SigmaMethod};
