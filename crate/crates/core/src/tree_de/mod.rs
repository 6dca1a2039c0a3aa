//! The Poisson tree that BP sees locally, its exact LLR, and the Gaussian
//! density evolution that tracks it.

pub mod bounds;
pub mod de;
pub mod law;
pub mod mc;
pub mod quadrature;
pub mod tree;

pub use bounds::{b_zero, bound_report, log_star, BoundReport, Verdict};
pub use de::{de_predict_error, de_run, gaussian_b, predict_error_terms, DeTrace};
pub use law::{level_laws, subtree_laws, Law, LawOptions, LevelLaw};
pub use mc::{
    b_integrand, law_b, law_map_error, mean_and_stderr, measure_b, sample_root_llrs,
    tree_map_error, MapError, RootModel, RootSampler, RootSamples,
};
pub use quadrature::{q_function, GaussHermite};
pub use tree::{sample_tree, tree_llr, tree_llrs, TreeInstance, TreeParams, NODE_CAP};
