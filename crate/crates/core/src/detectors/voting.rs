//! Partition-and-vote clean-up that turns a weak estimate into an exact one.
//!
//! Nodes are split into `1/delta` contiguous blocks of `n delta` ids. For each
//! block a weak estimator runs on the subgraph induced by the other blocks and
//! returns `K - K delta` nodes (rounded up). Every node in the held-out block
//! is then scored by its edges into that estimate plus its own side LLR, and
//! the `K` best scores overall form the output.

use rayon::prelude::*;

use crate::detectors::bp::propagate;
use crate::detectors::ml::ml_search;
use crate::detectors::topk::topk;
use crate::error::{Error, Result};
use crate::model::graph::GraphInstance;
use crate::model::llr::edge_llr;
use crate::model::metrics::{mismatch, nu, DetectionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakEstimator {
    /// Belief propagation with the given iteration count.
    Bp { iterations: usize },
    /// Brute-force maximum likelihood, subject to the search-space guard.
    Ml,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VotingConfig {
    pub delta: f64,
    pub weak: WeakEstimator,
}

impl VotingConfig {
    pub fn new(delta: f64, weak: WeakEstimator) -> Self {
        Self { delta, weak }
    }

    /// Number of blocks `1/delta`, checked against `n`.
    pub fn blocks(&self, n: usize) -> Result<usize> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        let blocks = (1.0 / self.delta).round();
        if ((1.0 / self.delta) - blocks).abs() > 1e-9 {
            return Err(Error::param(format!(
                "1/delta must be an integer, got {}",
                1.0 / self.delta
            )));
        }
        let blocks = blocks as usize;
        if !n.is_multiple_of(blocks) {
            return Err(Error::param(format!(
                "n delta = {} is not an integer",
                n as f64 * self.delta
            )));
        }
        Ok(blocks)
    }
}

/// Run the clean-up stage with node LLRs `h` (all zero when side information
/// is not used).
pub fn voting_cleanup(
    graph: &GraphInstance,
    h: &[f64],
    k: usize,
    config: &VotingConfig,
) -> Result<(DetectionResult, Vec<f64>)> {
    let n = graph.n;
    let blocks = config.blocks(n)?;
    if !(graph.q > 0.0 && graph.q <= graph.p && graph.p < 1.0) {
        return Err(Error::param("voting needs 0 < q <= p < 1"));
    }
    if k == 0 || k >= n {
        return Err(Error::param(format!("need 0 < K < n, got K={k}")));
    }
    let size = n / blocks;
    // ceil(K (1 - delta)) with delta = 1/blocks
    let kk = k - k / blocks;
    let present = edge_llr(graph.p, graph.q, true)?;
    let absent = edge_llr(graph.p, graph.q, false)?;
    let adj = &graph.adjacency;

    let scores: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|s| -> Result<Vec<f64>> {
            let block = s * size..(s + 1) * size;
            let rest: Vec<usize> = (0..n).filter(|i| !block.contains(i)).collect();
            let sub = adj.induced(&rest);
            let h_rest: Vec<f64> = rest.iter().map(|&i| h[i]).collect();
            let local = match config.weak {
                WeakEstimator::Bp { iterations } => {
                    let nu_rest = nu(rest.len() as f64, kk as f64);
                    let state = propagate(
                        &sub,
                        &h_rest,
                        kk as f64,
                        graph.p,
                        graph.q,
                        nu_rest,
                        iterations.max(1),
                    );
                    topk(&state.beliefs, kk)
                }
                WeakEstimator::Ml => ml_search(&sub, &h_rest, graph.p, graph.q, kk)?.0,
            };
            let mut in_estimate = vec![false; n];
            for &j in &local {
                in_estimate[rest[j]] = true;
            }
            Ok(block
                .map(|i| {
                    let c = adj.neighbors(i).iter().filter(|&&j| in_estimate[j]).count();
                    c as f64 * present + (kk - c) as f64 * absent + h[i]
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let r: Vec<f64> = scores.into_iter().flatten().collect();
    Ok((mismatch(graph, &topk(&r, k)), r))
}
