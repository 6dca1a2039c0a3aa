//! Finite-`n` weak and exact recovery checks.

use crate::error::{Error, Result};
use crate::exponents::psi::{chernoff_exponent, ExponentQuery, Side};
use crate::model::channel::SideChannel;
use crate::model::metrics::bernoulli_kl;

/// Default stand-in for "tends to infinity" in the first weak-recovery condition.
pub const DEFAULT_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakRecovery {
    pub feasible: bool,
    /// `(K-1) D(P||Q) + sum_m D(V_m||U_m)`, compared against the margin.
    pub lhs1: f64,
    /// `(K-1) D(P||Q) + 2 sum_m D(V_m||U_m)`, compared against `rhs2`.
    pub lhs2: f64,
    pub margin: f64,
    /// `2 log(n/K)`.
    pub rhs2: f64,
}

/// Evaluate both weak-recovery conditions at finite `n`.
///
/// `n` and `k` are reals so that very large populations can be queried.
pub fn weak_recovery_check(
    n: f64,
    k: f64,
    p: f64,
    q: f64,
    channel: &SideChannel,
    margin: f64,
) -> Result<WeakRecovery> {
    check_sizes(n, k)?;
    let d_graph = (k - 1.0) * bernoulli_kl(p, q);
    let d_side = channel.kl_plus_minus();
    let lhs1 = d_graph + d_side;
    let lhs2 = d_graph + 2.0 * d_side;
    let rhs2 = 2.0 * (n.ln() - k.ln());
    Ok(WeakRecovery {
        feasible: lhs1 > margin && lhs2 > rhs2,
        lhs1,
        lhs2,
        margin,
        rhs2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRecovery {
    pub feasible: bool,
    /// `E_QU(log(n/K), K, M)`.
    pub exponent: f64,
    /// `log n`.
    pub threshold: f64,
    pub t_star: f64,
}

impl ExactRecovery {
    /// `exponent / log n`; exact recovery needs this above one.
    pub fn ratio(&self) -> f64 {
        self.exponent / self.threshold
    }
}

/// Compare `E_QU(log(n/K), K, M)` against `log n`.
pub fn exact_recovery_check(
    n: f64,
    k: f64,
    p: f64,
    q: f64,
    channel: &SideChannel,
) -> Result<ExactRecovery> {
    check_sizes(n, k)?;
    let query = ExponentQuery {
        theta: n.ln() - k.ln(),
        m1: k,
        m2: 1.0,
        p,
        q,
        channel,
        side: Side::QU,
    };
    let e = chernoff_exponent(&query)?;
    let threshold = n.ln();
    Ok(ExactRecovery {
        feasible: e.value > threshold,
        exponent: e.value,
        threshold,
        t_star: e.t_star,
    })
}

fn check_sizes(n: f64, k: f64) -> Result<()> {
    if !(k >= 1.0 && k < n && n.is_finite()) {
        return Err(Error::param(format!("need 1 <= K < n, got K={k}, n={n}")));
    }
    Ok(())
}
