//! Chernoff-type exponents and recovery thresholds.

pub mod optimize;
pub mod phase;
pub mod psi;
pub mod recovery;
pub mod regime;

pub use phase::{phase_grid, phase_region, PhasePoint};
pub use psi::{chernoff_exponent, psi, ExponentQuery, ExponentResult, Side};
pub use recovery::{
    exact_recovery_check, weak_recovery_check, ExactRecovery, WeakRecovery, DEFAULT_MARGIN,
};
pub use regime::{
    eta, psi_curve, regime_threshold, Eta, OutcomeTrend, RegimeParams, RegimeThreshold, Trend,
};
