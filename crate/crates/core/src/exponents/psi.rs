//! Log-moment generating functions of the combined graph and side LLRs and
//! their Chernoff-type suprema.

use crate::error::{Error, Result};
use crate::exponents::optimize::{maximize_concave, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::model::channel::SideChannel;
use crate::model::llr::log_mgf;
use crate::model::metrics::bernoulli_kl;

/// Which pair of distributions the exponent tilts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Edge LLR under `Q`, side LLR under `U` (non-member); `t` in `[0, 1]`.
    QU,
    /// Edge LLR under `P`, side LLR under `V` (member); `t` in `[-1, 0]`.
    PV,
}

impl Side {
    pub fn interval(self) -> (f64, f64) {
        match self {
            Side::QU => (0.0, 1.0),
            Side::PV => (-1.0, 0.0),
        }
    }
}

/// Arguments of `psi` and of the exponent.
///
/// `m1` multiplies the per-edge log-MGF and `m2` multiplies the side term,
/// which already sums over every feature of `channel`. So `M` identical
/// features can be passed either as a replicated channel with `m2 = 1` or as
/// the single feature with `m2 = M`.
#[derive(Debug, Clone, Copy)]
pub struct ExponentQuery<'a> {
    pub theta: f64,
    pub m1: f64,
    pub m2: f64,
    pub p: f64,
    pub q: f64,
    pub channel: &'a SideChannel,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentResult {
    pub value: f64,
    pub t_star: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl ExponentQuery<'_> {
    fn validate(&self) -> Result<()> {
        if !(self.m1 >= 0.0 && self.m2 >= 0.0) {
            return Err(Error::param("multiplicities must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.p) || !(0.0..=1.0).contains(&self.q) {
            return Err(Error::param("edge probabilities must lie in [0, 1]"));
        }
        if !self.theta.is_finite() {
            return Err(Error::param("theta must be finite"));
        }
        Ok(())
    }

    /// `[-m1 D(Q||P) - m2 D(U||V), m1 D(P||Q) + m2 D(V||U)]`, the range of
    /// `theta` on which both exponents start at zero at opposite ends.
    pub fn theta_interval(&self) -> (f64, f64) {
        let lo = -(self.m1 * bernoulli_kl(self.q, self.p) + self.m2 * self.channel.kl_minus_plus());
        let hi = self.m1 * bernoulli_kl(self.p, self.q) + self.m2 * self.channel.kl_plus_minus();
        (lo, hi)
    }
}

fn graph_log_mgf(p: f64, q: f64, t: f64, under_p: bool) -> f64 {
    let ratio = |a: f64, b: f64| {
        if a == 0.0 && b == 0.0 {
            0.0
        } else if a == 0.0 {
            f64::NEG_INFINITY
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a.ln() - b.ln()
        }
    };
    let present = ratio(p, q);
    let absent = if p < 1.0 && q < 1.0 {
        (-p).ln_1p() - (-q).ln_1p()
    } else {
        ratio(1.0 - p, 1.0 - q)
    };
    let w = if under_p { p } else { q };
    log_mgf([(w, present), (1.0 - w, absent)], t)
}

/// `psi(t) = m1 log E[e^{t L_G}] + m2 log E[e^{t L_S}]` under `Q, U` or `P, V`.
///
/// `psi(0) = 0`. Zero-weight symbols are dropped from the expectation; a
/// positive-weight symbol with an infinite log-ratio gives `+inf` where
/// `t * ratio` is `+inf`.
pub fn psi(query: &ExponentQuery, t: f64) -> f64 {
    let under_plus = query.side == Side::PV;
    let mut value = 0.0;
    if query.m1 != 0.0 {
        value += query.m1 * graph_log_mgf(query.p, query.q, t, under_plus);
    }
    if query.m2 != 0.0 {
        value += query.m2 * query.channel.log_mgf(t, under_plus);
    }
    value
}

/// `sup_t [t theta - psi(t)]` over `[0, 1]` (QU) or `[-1, 0]` (PV).
pub fn chernoff_exponent(query: &ExponentQuery) -> Result<ExponentResult> {
    query.validate()?;
    let (lo, hi) = query.side.interval();
    let objective = |t: f64| t * query.theta - psi(query, t);
    let m = maximize_concave(objective, lo, hi, DEFAULT_TOL, DEFAULT_MAX_ITER);
    if m.value == f64::NEG_INFINITY {
        return Err(Error::Infeasible);
    }
    Ok(ExponentResult {
        value: m.value,
        t_star: m.t,
        converged: m.converged,
        iterations: m.iterations,
    })
}
