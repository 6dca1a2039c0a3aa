//! Detector selection shared by `experiment` and `detect`.

use anyhow::Result;
use hiddencomm_core::detectors::{
    bp_run, ml_bruteforce, voting_cleanup, BpConfig, Selection, VotingConfig, WeakEstimator,
};
use hiddencomm_core::{DetectionResult, GraphInstance, SideChannel, SideObservations};

use crate::options::param;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detector {
    Bp { selection: Selection },
    Ml,
    BpVote { delta: f64 },
}

impl Detector {
    pub fn parse(name: &str, delta: f64, threshold: bool) -> Result<Self> {
        let selection = if threshold {
            Selection::Threshold
        } else {
            Selection::TopK
        };
        match name {
            "bp" => Ok(Detector::Bp { selection }),
            "ml" => Ok(Detector::Ml),
            "bp+vote" | "vote" => Ok(Detector::BpVote { delta }),
            other => Err(param(format!(
                "unknown detector `{other}` (expected bp, ml or bp+vote)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Detector::Bp { .. } => "bp",
            Detector::Ml => "ml",
            Detector::BpVote { .. } => "bp+vote",
        }
    }
}

/// Run `detector`, using the side observations only when `use_side` is set.
/// Returns the result and a per-node score: the BP belief, the voting score,
/// or the node LLR for maximum likelihood.
pub fn run_detector(
    detector: Detector,
    graph: &GraphInstance,
    side: &SideObservations,
    channel: &SideChannel,
    iterations: usize,
    use_side: bool,
) -> Result<(DetectionResult, Vec<f64>)> {
    let h = if use_side {
        side.node_llrs(channel)?
    } else {
        vec![0.0; graph.n]
    };
    Ok(match detector {
        Detector::Bp { selection } => {
            let cfg =
                BpConfig::new(graph.n, graph.k, iterations, use_side)?.with_selection(selection);
            let out = bp_run(graph, side, channel, &cfg)?;
            (out.result, out.state.beliefs)
        }
        Detector::Ml => {
            let (result, _) = ml_bruteforce(graph, &h, graph.k)?;
            (result, h)
        }
        Detector::BpVote { delta } => {
            let cfg = VotingConfig::new(delta, WeakEstimator::Bp { iterations });
            voting_cleanup(graph, &h, graph.k, &cfg)?
        }
    })
}
