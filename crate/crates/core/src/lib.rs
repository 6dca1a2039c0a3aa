//! Single hidden-community recovery in random graphs with per-node side
//! information.
//!
//! The crate is organised around five concerns:
//!
//! * [`model`]: planted-community graph and side-information generators,
//!   log-likelihood ratios, divergences and the misclassification metric.
//! * [`exponents`]: Chernoff-type exponents, weak/exact recovery checks,
//!   closed-form thresholds in the logarithmic regime and phase regions.
//! * [`detectors`]: belief propagation, brute-force maximum likelihood and
//!   the partition-and-vote clean-up stage.
//! * [`tree_de`]: the Poisson tree model, its exact LLR recursion, subtree
//!   laws, Gaussian density evolution and the `b_t` bound report.
//! * [`io`]: the edge-list and side-observation file formats.
//!
//! Randomness is always explicit: every sampler takes a seed and derives its
//! own ChaCha stream (see [`rng`]).

pub mod detectors;
pub mod error;
pub mod exponents;
pub mod io;
pub mod model;
pub mod rng;
pub mod tree_de;

pub use error::{Error, Result};
pub use model::{
    channel::{ChannelKind, Feature, SideChannel},
    graph::{Adjacency, GraphInstance, SizeMode},
    metrics::DetectionResult,
    side::SideObservations,
};
