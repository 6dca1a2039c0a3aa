//! Closed-form exact-recovery thresholds in the logarithmic regime
//! `K = rho n / log n`, `p = a log^2 n / n`, `q = b log^2 n / n`.

use crate::error::{Error, Result};
use crate::exponents::optimize::{maximize_concave, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub rho: f64,
    pub a: f64,
    pub b: f64,
}

impl RegimeParams {
    pub fn new(rho: f64, a: f64, b: f64) -> Result<Self> {
        if !(rho > 0.0 && b > 0.0 && a > b && a.is_finite()) {
            return Err(Error::param(format!(
                "need rho > 0 and a > b > 0, got rho={rho}, a={a}, b={b}"
            )));
        }
        Ok(Self { rho, a, b })
    }

    /// `T = log(a/b)`.
    pub fn t(&self) -> f64 {
        self.a.ln() - self.b.ln()
    }

    /// Upper end of the admissible `|beta|` range, `rho (a - b - b T)`.
    pub fn beta_bound(&self) -> f64 {
        self.rho * (self.a - self.b - self.b * self.t())
    }

    /// `(K, p, q)` of the regime at population `n`.
    pub fn instance(&self, n: f64) -> (f64, f64, f64) {
        let l = n.ln();
        (self.rho * n / l, self.a * l * l / n, self.b * l * l / n)
    }
}

/// Which closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eta {
    One,
    Two,
    Three,
}

/// `eta_1`, `eta_2(beta)` or `eta_3(beta)`. `beta` is ignored for `eta_1` and
/// must lie in `[0, rho (a - b - b T)]` otherwise.
pub fn eta(which: Eta, params: &RegimeParams, beta: f64) -> Result<f64> {
    let RegimeParams { rho, a, b } = *params;
    if a == b {
        return Err(Error::param("a = b makes T = log(a/b) vanish"));
    }
    let t = params.t();
    let tilted = |gap: f64| rho * b + (gap / t) * (gap.ln() - (rho * b * t).ln() - 1.0);
    match which {
        Eta::One => Ok(rho * (b + ((a - b) / t) * ((a - b).ln() - (b * t).ln() - 1.0))),
        Eta::Two | Eta::Three => {
            let bound = params.beta_bound();
            if !(0.0..=bound).contains(&beta) {
                return Err(Error::UnsupportedRegime(format!(
                    "beta = {beta} outside [0, {bound}]"
                )));
            }
            Ok(match which {
                Eta::Two => tilted(rho * (a - b) - beta) + beta,
                _ => tilted(rho * (a - b) + beta),
            })
        }
    }
}

/// Growth of a side-information statistic with `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trend {
    /// `o(log n)`.
    Sublog,
    /// `coef * log n + o(log n)`.
    LogLinear(f64),
    /// Faster than `log n` (including infinite LLRs and zero likelihoods).
    Superlog,
}

impl Trend {
    fn coef(self) -> Option<f64> {
        match self {
            Trend::Sublog => Some(0.0),
            Trend::LogLinear(c) => Some(c),
            Trend::Superlog => None,
        }
    }
}

/// Trends of `(f1, f2, f3) = (sum h, sum log alpha_plus, sum log alpha_minus)`
/// along one sequence of side-information outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeTrend {
    pub f1: Trend,
    pub f2: Trend,
    pub f3: Trend,
}

impl OutcomeTrend {
    pub fn new(f1: Trend, f2: Trend, f3: Trend) -> Self {
        Self { f1, f2, f3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeThreshold {
    /// Minimum over all matched cases; exact recovery needs this above one.
    pub condition_value: f64,
    /// Case (1-6) attaining the minimum.
    pub case_id: u8,
    /// Every matched `(case, value)` pair, in outcome order.
    pub matched: Vec<(u8, f64)>,
}

impl RegimeThreshold {
    pub fn feasible(&self) -> bool {
        self.condition_value > 1.0
    }
}

const COEF_TOL: f64 = 1e-9;

/// Classify each declared outcome trend and return the smallest threshold.
///
/// Outcomes with a super-logarithmic statistic are skipped: either the side
/// information alone decides the node, or the outcome is too unlikely to
/// matter. A log-linear `f1` is matched on `|beta|`, so outcomes with a
/// negative LLR coefficient (e.g. a disagreeing noisy label) land on the same
/// closed forms as their positive counterparts.
pub fn regime_threshold(
    params: &RegimeParams,
    outcomes: &[OutcomeTrend],
) -> Result<RegimeThreshold> {
    let mut matched = Vec::new();
    for o in outcomes {
        let (Some(c1), Some(c2), Some(c3)) = (o.f1.coef(), o.f2.coef(), o.f3.coef()) else {
            continue;
        };
        if c2 > COEF_TOL || c3 > COEF_TOL {
            return Err(Error::param("log-likelihood trends cannot grow positively"));
        }
        if (c1 - (c2 - c3)).abs() > COEF_TOL {
            return Err(Error::param(format!(
                "inconsistent trends: f1 = {c1} but f2 - f3 = {}",
                c2 - c3
            )));
        }
        let zero = |c: f64| c.abs() <= COEF_TOL;
        if zero(c1) {
            if zero(c2) && zero(c3) {
                matched.push((1, eta(Eta::One, params, 0.0)?));
            } else {
                matched.push((2, eta(Eta::One, params, 0.0)? - c2));
            }
            continue;
        }
        let beta = c1.abs();
        let bound = params.beta_bound();
        if beta >= bound {
            return Err(Error::UnsupportedRegime(format!(
                "|beta| = {beta} is not below rho (a - b - b T) = {bound}"
            )));
        }
        if zero(c2) {
            matched.push((3, eta(Eta::Two, params, beta)?));
        } else {
            matched.push((5, eta(Eta::Two, params, beta)? - c2));
        }
        if zero(c3) {
            matched.push((4, eta(Eta::Three, params, beta)?));
        } else {
            matched.push((6, eta(Eta::Three, params, beta)? - c3));
        }
    }
    let &(case_id, condition_value) = matched
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::UnsupportedRegime("no outcome with log-order statistics".into()))?;
    Ok(RegimeThreshold {
        condition_value,
        case_id,
        matched,
    })
}

/// Outcome trends of a noisy-label channel with `log((1-alpha)/alpha) = beta log n`
/// (`beta = 0` for constant `alpha`).
pub fn noisy_label_trends(beta: f64) -> Vec<OutcomeTrend> {
    let lin = |c: f64| {
        if c == 0.0 {
            Trend::Sublog
        } else {
            Trend::LogLinear(c)
        }
    };
    vec![
        OutcomeTrend::new(lin(beta), Trend::Sublog, lin(-beta)),
        OutcomeTrend::new(lin(-beta), lin(-beta), Trend::Sublog),
    ]
}

/// Outcome trends of a partially revealed label with `log eps = -beta log n`.
pub fn partial_reveal_trends(beta: f64) -> Vec<OutcomeTrend> {
    let lin = |c: f64| {
        if c == 0.0 {
            Trend::Sublog
        } else {
            Trend::LogLinear(c)
        }
    };
    vec![
        OutcomeTrend::new(Trend::Superlog, Trend::Sublog, Trend::Superlog),
        OutcomeTrend::new(Trend::Superlog, Trend::Superlog, Trend::Sublog),
        OutcomeTrend::new(Trend::Sublog, lin(-beta), lin(-beta)),
    ]
}

/// `sup_t [t c (a - b) + b c - b c (a/b)^t - log((1-alpha)^t alpha^{1-t} + (1-alpha)^{1-t} alpha^t)]`,
/// the exponent with constant noisy labels when `K = c n / log n`.
pub fn psi_curve(alpha: f64, c: f64, a: f64, b: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::param(format!(
            "alpha must lie in (0, 0.5), got {alpha}"
        )));
    }
    if !(c > 0.0 && b > 0.0 && a >= b) {
        return Err(Error::param("need c > 0 and a >= b > 0"));
    }
    let t_ab = a.ln() - b.ln();
    let (la, lb) = (alpha.ln(), (-alpha).ln_1p());
    let objective = |t: f64| {
        let side = ((t * lb + (1.0 - t) * la).exp() + ((1.0 - t) * lb + t * la).exp()).ln();
        t * c * (a - b) + b * c - b * c * (t * t_ab).exp() - side
    };
    Ok(maximize_concave(objective, 0.0, 1.0, DEFAULT_TOL, DEFAULT_MAX_ITER).value)
}
