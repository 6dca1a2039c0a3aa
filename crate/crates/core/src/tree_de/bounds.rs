//! Analytic bounds on `b_t = E[1/(e^{-Gamma_1^t} + e^{-nu})]`.
//!
//! The upper sequence iterates `a_{t+1} = Lambda e^{lambda a_t}` from the
//! exact `b_0`; when `lambda Lambda e <= 1` it never leaves `[0, Lambda e]`.
//! The lower sequence iterates
//! `b_{t+1} = Lambda e^{lambda b_t} (1 - (Lambda'/Lambda) e^{-nu/2})` while
//! `b_t <= nu / (2 (C - lambda))`, with `C = lambda (2 + p/q)`.

use crate::error::{Error, Result};
use crate::model::channel::SideChannel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `lambda Lambda e <= 1`.
    Subcritical,
    Supercritical,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Subcritical => "subcritical",
            Verdict::Supercritical => "supercritical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lambda: f64,
    pub nu: f64,
    pub lambda_side: f64,
    /// `E[e^{3 U_0}] = sum alpha_+^3 / alpha_-^2`.
    pub lambda_prime: f64,
    /// `(p/q)^{3/2}`.
    pub b_const: f64,
    /// `lambda (2 + p/q)`.
    pub c_const: f64,
    /// Lower-bound sequence, stopped once it passes `nu / (2 (C - lambda))`.
    pub b: Vec<f64>,
    /// Upper-bound sequence `a_0 = b_0, a_{t+1} = Lambda e^{lambda a_t}`.
    pub a: Vec<f64>,
    pub log_star_nu: u32,
    pub verdict: Verdict,
}

impl BoundReport {
    /// `lambda Lambda e`.
    pub fn criticality(&self) -> f64 {
        self.lambda * self.lambda_side * std::f64::consts::E
    }

    /// Key-value text, one `key=value` per line.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "lambda={}\nnu={}\nlambda_side={}\nlambda_prime={}\nB={}\nC={}\nlambda_lambda_e={}\nlog_star_nu={}\nverdict={}\nb_lower={}\nb_upper={}\n",
            self.lambda,
            self.nu,
            self.lambda_side,
            self.lambda_prime,
            self.b_const,
            self.c_const,
            self.criticality(),
            self.log_star_nu,
            self.verdict.as_str(),
            join(&self.b),
            join(&self.a),
        )
    }
}

/// Number of times `ln` must be applied to bring `x` to at most one.
pub fn log_star(x: f64) -> u32 {
    let mut x = x;
    let mut count = 0;
    while x > 1.0 {
        x = x.ln();
        count += 1;
    }
    count
}

/// `b_0 = sum alpha_+ / (e^{-h} + e^{-nu})`, exact.
pub fn b_zero(nu: f64, channel: &SideChannel) -> f64 {
    let en = (-nu).exp();
    channel
        .llr_atoms(true)
        .iter()
        .map(|&(h, w)| {
            if h == f64::INFINITY {
                w / en
            } else {
                w / ((-h).exp() + en)
            }
        })
        .sum()
}

pub fn bound_report(
    lambda: f64,
    p: f64,
    q: f64,
    nu: f64,
    channel: &SideChannel,
    t_max: usize,
) -> Result<BoundReport> {
    if !(lambda >= 0.0 && lambda.is_finite() && nu.is_finite()) {
        return Err(Error::param("need finite lambda >= 0 and finite nu"));
    }
    if !(q > 0.0 && q <= p) {
        return Err(Error::param("need 0 < q <= p"));
    }
    let lambda_side = channel.lambda_side();
    let lambda_prime = channel.lambda_prime();
    if !(lambda_side.is_finite() && lambda_prime.is_finite()) {
        return Err(Error::param("Lambda and Lambda' must be finite"));
    }
    let ratio = p / q;
    let c_const = lambda * (2.0 + ratio);
    let limit = if c_const > lambda {
        nu / (2.0 * (c_const - lambda))
    } else {
        f64::INFINITY
    };
    let factor = (1.0 - lambda_prime / lambda_side * (-nu / 2.0).exp()).max(0.0);

    let b0 = b_zero(nu, channel);
    let mut b = vec![b0];
    while b.len() <= t_max && *b.last().unwrap() <= limit {
        b.push(lambda_side * (lambda * b.last().unwrap()).exp() * factor);
    }
    let mut a = vec![b0];
    for _ in 0..t_max {
        let next = lambda_side * (lambda * a.last().unwrap()).exp();
        if !next.is_finite() {
            break;
        }
        a.push(next);
    }
    let verdict = if lambda * lambda_side * std::f64::consts::E <= 1.0 {
        Verdict::Subcritical
    } else {
        Verdict::Supercritical
    };
    Ok(BoundReport {
        lambda,
        nu,
        lambda_side,
        lambda_prime,
        b_const: ratio.powf(1.5),
        c_const,
        b,
        a,
        log_star_nu: log_star(nu),
        verdict,
    })
}
