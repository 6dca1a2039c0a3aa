//! Data model: graphs, side channels, observations, LLRs and metrics.

pub mod channel;
pub mod graph;
pub mod llr;
pub mod metrics;
pub mod side;

pub use channel::make_channel;
pub use graph::generate_graph;
pub use llr::edge_llr;
pub use metrics::{divergences, lambda_snr, mismatch};
pub use side::sample_side_info;
