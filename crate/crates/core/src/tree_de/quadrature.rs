//! Gauss–Hermite quadrature for expectations over a standard normal.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 61;
pub const MIN_NODES: usize = 21;

/// Nodes and weights for `int f(x) e^{-x^2} dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Newton iteration on the orthonormal Hermite recurrence, with the usual
    /// asymptotic starting guesses.
    pub fn new(count: usize) -> Result<Self> {
        if count < MIN_NODES {
            return Err(Error::param(format!(
                "need at least {MIN_NODES} quadrature nodes, got {count}"
            )));
        }
        let n = count;
        let nf = n as f64;
        let pim4 = PI.powf(-0.25);
        let half = n.div_ceil(2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut z = 0.0;
        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Numeric {
                    step: i,
                    what: "Hermite root did not converge".into(),
                });
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[f(Z)]` for `Z ~ N(0, 1)`, via `x = z / sqrt(2)`.
    pub fn expect_normal(&self, f: impl Fn(f64) -> f64) -> f64 {
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(SQRT_2 * x))
            .sum();
        sum / PI.sqrt()
    }
}

/// Standard normal upper tail `P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}
