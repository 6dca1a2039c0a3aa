//! Maximum-likelihood scoring and its brute-force maximiser.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::graph::{Adjacency, GraphInstance};
use crate::model::llr::{edge_llr, LlrSum};
use crate::model::metrics::{mismatch, DetectionResult};

/// Largest number of candidate subsets the brute-force search will visit.
pub const MAX_CANDIDATES: f64 = 1e6;

/// Log-likelihood ratio of "`candidate` is the community" against "no node is":
/// the pair LLRs inside the candidate plus the node LLRs of its members.
///
/// `h` holds the node LLRs. Infinite terms follow [`LlrSum`]: any `-inf`
/// makes the score `-inf`.
pub fn ml_score(adj: &Adjacency, h: &[f64], p: f64, q: f64, candidate: &[usize]) -> Result<f64> {
    let present = edge_llr(p, q, true)?;
    let absent = edge_llr(p, q, false)?;
    let mut sorted = candidate.to_vec();
    sorted.sort_unstable();
    let mut inside = 0usize;
    for (idx, &i) in sorted.iter().enumerate() {
        inside += sorted[idx + 1..]
            .iter()
            .filter(|&&j| adj.has_edge(i, j))
            .count();
    }
    let pairs = sorted.len() * sorted.len().saturating_sub(1) / 2;
    let mut sum = LlrSum::default();
    // counts multiply only finite terms; a zero count never meets an infinity
    for (count, llr) in [(inside, present), (pairs - inside, absent)] {
        if count > 0 {
            sum.add(if llr.is_finite() {
                count as f64 * llr
            } else {
                llr
            });
        }
    }
    sum.extend(sorted.iter().map(|&i| h[i]));
    Ok(sum.value())
}

/// `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Best `k`-subset by score, with `h` the node LLRs. Returns the ids (sorted) and
/// the score. Among equal scores the lexicographically smallest subset wins.
pub fn ml_search(
    adj: &Adjacency,
    h: &[f64],
    p: f64,
    q: f64,
    k: usize,
) -> Result<(Vec<usize>, f64)> {
    let n = adj.num_nodes();
    if k > n {
        return Err(Error::param(format!("K = {k} exceeds n = {n}")));
    }
    let candidates = binomial(n, k);
    if candidates > MAX_CANDIDATES {
        return Err(Error::SearchSpace {
            candidates,
            limit: MAX_CANDIDATES,
        });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in (0..n).combinations(k) {
        let score = ml_score(adj, h, p, q, &subset)?;
        if best.as_ref().is_none_or(|(_, s)| score > *s) {
            best = Some((subset, score));
        }
    }
    Ok(best.expect("at least one subset"))
}

/// Brute-force maximum-likelihood detection on a sampled instance.
pub fn ml_bruteforce(graph: &GraphInstance, h: &[f64], k: usize) -> Result<(DetectionResult, f64)> {
    let (estimate, score) = ml_search(&graph.adjacency, h, graph.p, graph.q, k)?;
    Ok((mismatch(graph, &estimate), score))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::graph::SizeMode;
    use approx::assert_relative_eq;

    fn hexagon() -> GraphInstance {
        let adj =
            Adjacency::from_edges(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
                .unwrap();
        GraphInstance::from_parts(
            6,
            3,
            0.5,
            0.25,
            SizeMode::Deterministic,
            0,
            vec![0, 1, 2],
            adj,
        )
        .unwrap()
    }

    #[test]
    fn hand_computed_score() {
        let g = hexagon();
        let h = [0.1, -0.2, 0.3, 0.0, 0.5, -1.0];
        let (l1, l0) = (2f64.ln(), (0.5f64 / 0.75).ln());
        // {0, 2, 3}: edges 0-2 and 2-3 present, 0-3 absent
        let by_hand = 2.0 * l1 + l0 + 0.1 + 0.3 + 0.0;
        assert_relative_eq!(
            ml_score(&g.adjacency, &h, 0.5, 0.25, &[3, 0, 2]).unwrap(),
            by_hand,
            max_relative = 1e-12
        );
        // {1, 4, 5}: only 4-5 present
        let by_hand = l1 + 2.0 * l0 - 0.2 + 0.5 - 1.0;
        assert_relative_eq!(
            ml_score(&g.adjacency, &h, 0.5, 0.25, &[1, 4, 5]).unwrap(),
            by_hand,
            max_relative = 1e-12
        );
    }

    #[test]
    fn singleton_score_is_node_llr() {
        let g = hexagon();
        let h = [0.1, -0.2, 0.3, 0.0, 0.5, -1.0];
        for i in 0..6 {
            assert_eq!(ml_score(&g.adjacency, &h, 0.5, 0.25, &[i]).unwrap(), h[i]);
        }
    }

    #[test]
    fn no_signal_scores_zero() {
        let g = hexagon();
        let h = [0.0; 6];
        for s in (0..6).combinations(3) {
            assert_eq!(ml_score(&g.adjacency, &h, 0.3, 0.3, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn full_set_when_k_equals_n() {
        let g = hexagon();
        let (r, _) = ml_bruteforce(&g, &[0.0; 6], 6).unwrap();
        assert_eq!(r.estimate, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn guard() {
        let adj = Adjacency::from_edges(60, &[]).unwrap();
        assert!(matches!(
            ml_search(&adj, &[0.0; 60], 0.5, 0.1, 10),
            Err(Error::SearchSpace { .. })
        ));
        assert_eq!(binomial(12, 3), 220.0);
        assert_eq!(binomial(5, 0), 1.0);
    }
}
