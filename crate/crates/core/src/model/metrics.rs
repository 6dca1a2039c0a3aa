//! Signal-to-noise quantities, divergences and the misclassification metric.

use crate::model::channel::SideChannel;
use crate::model::graph::GraphInstance;

/// `lambda = K^2 (p - q)^2 / ((n - K) q)`.
pub fn lambda_snr(n: f64, k: f64, p: f64, q: f64) -> f64 {
    let gap = k * (p - q);
    gap * gap / ((n - k) * q)
}

/// `nu = log((n - K) / K)`, the MAP threshold on the tree.
pub fn nu(n: f64, k: f64) -> f64 {
    (n - k).ln() - k.ln()
}

/// `D(Bern(a) || Bern(b))`, with `0 log 0 = 0` and `+inf` for unsupported mass.
pub fn bernoulli_kl(a: f64, b: f64) -> f64 {
    let term = |x: f64, y: f64, lx: f64, ly: f64| {
        if x == 0.0 {
            0.0
        } else if y == 0.0 {
            f64::INFINITY
        } else {
            x * (lx - ly)
        }
    };
    term(a, b, a.ln(), b.ln()) + term(1.0 - a, 1.0 - b, (-a).ln_1p(), (-b).ln_1p())
}

/// Graph and side-information divergences.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergences {
    pub d_pq: f64,
    pub d_qp: f64,
    /// `D(V_m || U_m)` per feature.
    pub d_vu: Vec<f64>,
    /// `D(U_m || V_m)` per feature.
    pub d_uv: Vec<f64>,
}

pub fn divergences(p: f64, q: f64, channel: &SideChannel) -> Divergences {
    Divergences {
        d_pq: bernoulli_kl(p, q),
        d_qp: bernoulli_kl(q, p),
        d_vu: channel
            .features()
            .iter()
            .map(|f| f.kl_plus_minus())
            .collect(),
        d_uv: channel
            .features()
            .iter()
            .map(|f| f.kl_minus_plus())
            .collect(),
    }
}

/// An estimated community scored against the planted one.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Estimated ids, sorted.
    pub estimate: Vec<usize>,
    /// `sym_diff / (2K)`.
    pub zeta: f64,
    /// `|estimate △ community|`.
    pub sym_diff: usize,
}

impl DetectionResult {
    pub fn exact(&self) -> bool {
        self.sym_diff == 0
    }
}

/// Score `estimate` against the planted community of `graph`.
pub fn mismatch(graph: &GraphInstance, estimate: &[usize]) -> DetectionResult {
    let mut estimate = estimate.to_vec();
    estimate.sort_unstable();
    estimate.dedup();
    let overlap = estimate.iter().filter(|&&i| graph.is_member(i)).count();
    let sym_diff = estimate.len() + graph.community.len() - 2 * overlap;
    DetectionResult {
        zeta: sym_diff as f64 / (2.0 * graph.k as f64),
        sym_diff,
        estimate,
    }
}
