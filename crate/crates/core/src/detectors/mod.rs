//! Community detectors on concrete instances.

pub mod bp;
pub mod ml;
pub mod topk;
pub mod voting;

pub use bp::{bp_run, message_fn, propagate, BpConfig, BpOutput, BpState, MessageFn, Selection};
pub use ml::{ml_bruteforce, ml_score, ml_search};
pub use topk::topk;
pub use voting::{voting_cleanup, VotingConfig, WeakEstimator};
