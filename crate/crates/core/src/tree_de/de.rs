//! Gaussian density evolution for the belief-propagation LLR.
//!
//! Conditioned on the root label, `Z^t = Gamma^t - h` is close to
//! `N(-v_t/2, v_t)` for a non-member and `N(v_t/2, v_t)` for a member, with
//!
//! ```text
//! v_0 = 0,   v_{t+1} = lambda E[ 1 / (e^{-nu} + e^{-(v_t/2 + sqrt(v_t) Z) - U_1}) ]
//! ```
//!
//! where `U_1` is the side LLR of a member. The normal expectation uses
//! Gauss–Hermite quadrature and the `U_1` expectation is an exact sum over the
//! LLR atoms.

use crate::error::{Error, Result};
use crate::model::channel::SideChannel;
use crate::tree_de::quadrature::{q_function, GaussHermite};

#[derive(Debug, Clone, PartialEq)]
pub struct DeTrace {
    pub lambda: f64,
    pub nu: f64,
    pub channel: SideChannel,
    /// `v_0, ..., v_T`.
    pub v: Vec<f64>,
    /// Per `t`: `((n-K)/K P(false alarm), P(miss))` under the Gaussian law.
    pub predicted_err: Vec<(f64, f64)>,
}

impl DeTrace {
    pub fn t_max(&self) -> usize {
        self.v.len() - 1
    }

    /// Predicted `E|C^ xor C*| / K` at step `t`.
    pub fn total_err(&self, t: usize) -> f64 {
        let (a, b) = self.predicted_err[t];
        a + b
    }
}

/// `E[1/(e^{-nu} + e^{-x})]` for `x = v/2 + sqrt(v) Z + U_1`.
pub fn gaussian_b(v: f64, nu: f64, member_atoms: &[(f64, f64)], gh: &GaussHermite) -> f64 {
    let en = (-nu).exp();
    let logistic = |x: f64| {
        if x == f64::INFINITY {
            1.0 / en
        } else {
            1.0 / (en + (-x).exp())
        }
    };
    member_atoms
        .iter()
        .map(|&(u, w)| {
            if v == 0.0 || u.is_infinite() {
                w * logistic(u)
            } else {
                let s = v.sqrt();
                w * gh.expect_normal(|z| logistic(v / 2.0 + s * z + u))
            }
        })
        .sum()
}

/// `((n/K - 1) P(U_0 + Z_0 >= nu), P(U_1 + Z_1 < nu))` with `Z_tau ~ N(+-v/2, v)`.
///
/// At `v = 0` the test is on `h` alone.
pub fn predict_error_terms(v: f64, nu: f64, channel: &SideChannel, n_over_k: f64) -> (f64, f64) {
    let weight = n_over_k - 1.0;
    let u0 = channel.llr_atoms(false);
    let u1 = channel.llr_atoms(true);
    if v == 0.0 {
        let fa: f64 = u0.iter().filter(|a| a.0 >= nu).map(|a| a.1).sum();
        let miss: f64 = u1.iter().filter(|a| a.0 < nu).map(|a| a.1).sum();
        return (weight * fa, miss);
    }
    let s = v.sqrt();
    let fa: f64 = u0
        .iter()
        .map(|&(u, w)| w * q_function((nu + v / 2.0 - u) / s))
        .sum();
    let miss: f64 = u1
        .iter()
        .map(|&(u, w)| w * q_function((-nu + v / 2.0 + u) / s))
        .sum();
    (weight * fa, miss)
}

/// Iterate the variance recursion up to `t_max`.
pub fn de_run(
    lambda: f64,
    nu: f64,
    channel: &SideChannel,
    t_max: usize,
    quad_nodes: usize,
) -> Result<DeTrace> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    if !nu.is_finite() {
        return Err(Error::param("nu must be finite"));
    }
    let gh = GaussHermite::new(quad_nodes)?;
    let atoms = channel.llr_atoms(true);
    let n_over_k = nu.exp() + 1.0;
    let mut v = vec![0.0];
    for t in 0..t_max {
        let next = lambda * gaussian_b(v[t], nu, &atoms, &gh);
        if !next.is_finite() {
            return Err(Error::Numeric {
                step: t + 1,
                what: format!("v became {next}"),
            });
        }
        v.push(next);
    }
    let predicted_err = v
        .iter()
        .map(|&vt| predict_error_terms(vt, nu, channel, n_over_k))
        .collect();
    Ok(DeTrace {
        lambda,
        nu,
        channel: channel.clone(),
        v,
        predicted_err,
    })
}

/// Predicted `E|C^ xor C*| / K` at the last step of the trace.
pub fn de_predict_error(trace: &DeTrace, n_over_k: f64) -> f64 {
    let (a, b) = predict_error_terms(*trace.v.last().unwrap(), trace.nu, &trace.channel, n_over_k);
    a + b
}
