//! Belief propagation for a single planted community.
//!
//! Messages live on directed edges in CSR order. Each round reads the previous
//! buffer and writes the next one, so the schedule is synchronous and the
//! result does not depend on how the work is split across threads.
//!
//! The estimate is the `K` nodes with the largest beliefs. When the realised
//! community size differs from `K`, this is within a factor of two (plus the
//! size gap) of the threshold estimate `{i : R_i >= nu}`, which is also
//! available through [`Selection::Threshold`].

use rayon::prelude::*;

use crate::detectors::topk::topk;
use crate::error::{Error, Result};
use crate::model::channel::SideChannel;
use crate::model::graph::{Adjacency, GraphInstance};
use crate::model::metrics::{mismatch, nu, DetectionResult};
use crate::model::side::SideObservations;

/// How beliefs are turned into an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// The `K` largest beliefs, ties to the lower id.
    #[default]
    TopK,
    /// Every node with belief at least `nu`.
    Threshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpConfig {
    iterations: usize,
    k: usize,
    nu: f64,
    pub use_side: bool,
    pub selection: Selection,
}

impl BpConfig {
    /// `nu = log((n - K) / K)` is derived from `n` and `k`.
    pub fn new(n: usize, k: usize, iterations: usize, use_side: bool) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::param("BP needs at least one iteration"));
        }
        if k == 0 || k >= n {
            return Err(Error::param(format!("need 0 < K < n, got K={k}, n={n}")));
        }
        Ok(Self {
            iterations,
            k,
            nu: nu(n as f64, k as f64),
            use_side,
            selection: Selection::TopK,
        })
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// `M(x) = log((p/q e^{x - nu} + 1) / (e^{x - nu} + 1))`, evaluated as
/// `log1p((p/q - 1) / (1 + e^{-(x - nu)}))`.
#[derive(Debug, Clone, Copy)]
pub struct MessageFn {
    gain: f64,
    saturation: f64,
    nu: f64,
}

impl MessageFn {
    pub fn new(p: f64, q: f64, nu: f64) -> Self {
        let gain = p / q - 1.0;
        // the same expression as the finite branch, so large x meets the limit exactly
        Self {
            gain,
            saturation: gain.ln_1p(),
            nu,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return self.saturation;
        }
        (self.gain / (1.0 + (self.nu - x).exp())).ln_1p()
    }

    /// `log(p/q)`, the limit as `x -> inf`.
    pub fn saturation(&self) -> f64 {
        self.saturation
    }
}

/// Single evaluation of the message function.
pub fn message_fn(x: f64, p: f64, q: f64, nu: f64) -> f64 {
    MessageFn::new(p, q, nu).eval(x)
}

/// Messages and beliefs after a run.
#[derive(Debug, Clone, PartialEq)]
pub struct BpState {
    /// `R_{i -> j}` indexed by directed edge in CSR order of the adjacency.
    pub messages: Vec<f64>,
    pub beliefs: Vec<f64>,
    pub iteration: usize,
}

impl BpState {
    /// Message from `i` to its neighbour `j`.
    pub fn message(&self, adj: &Adjacency, i: usize, j: usize) -> Option<f64> {
        let pos = adj.neighbors(i).binary_search(&j).ok()?;
        Some(self.messages[adj.offsets()[i] + pos])
    }
}

/// Run `iterations - 1` message rounds from all-zero messages, then form beliefs.
///
/// `h` holds the node LLRs; `k` enters through the offset `K (p - q)`.
pub fn propagate(
    adj: &Adjacency,
    h: &[f64],
    k: f64,
    p: f64,
    q: f64,
    nu: f64,
    iterations: usize,
) -> BpState {
    let n = adj.num_nodes();
    assert_eq!(h.len(), n, "one node LLR per node");
    let m = MessageFn::new(p, q, nu);
    let offset = k * (p - q);
    let offsets = adj.offsets();
    let targets = adj.targets();
    let rev = adj.reverse_edges();
    // base_i = h_i - K(p - q) is shared by all rounds
    let base: Vec<f64> = h.iter().map(|&x| x - offset).collect();

    let mut messages = vec![0.0; targets.len()];
    let mut next = vec![0.0; targets.len()];
    let mut mv = vec![0.0; targets.len()];
    let mut incoming = vec![0.0; n];

    let gather = |mv: &mut Vec<f64>, incoming: &mut Vec<f64>, messages: &[f64]| {
        mv.par_iter_mut()
            .zip(messages.par_iter())
            .for_each(|(out, &x)| *out = m.eval(x));
        // edges leaving i are reversed into edges entering i
        incoming
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, s)| *s = (offsets[i]..offsets[i + 1]).map(|e| mv[rev[e]]).sum());
    };

    for _ in 1..iterations {
        gather(&mut mv, &mut incoming, &messages);
        next.par_chunks_mut(1024)
            .enumerate()
            .for_each(|(chunk, out)| {
                let start = chunk * 1024;
                let mut i = offsets.partition_point(|&o| o <= start) - 1;
                for (off, slot) in out.iter_mut().enumerate() {
                    let e = start + off;
                    while offsets[i + 1] <= e {
                        i += 1;
                    }
                    *slot = base[i] + incoming[i] - mv[rev[e]];
                }
            });
        std::mem::swap(&mut messages, &mut next);
    }
    gather(&mut mv, &mut incoming, &messages);
    let beliefs = (0..n)
        .into_par_iter()
        .map(|i| base[i] + incoming[i])
        .collect();
    BpState {
        messages,
        beliefs,
        iteration: iterations,
    }
}

/// Output of [`bp_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct BpOutput {
    pub result: DetectionResult,
    pub state: BpState,
}

/// Belief propagation on a sampled instance, scored against its community.
pub fn bp_run(
    graph: &GraphInstance,
    side: &SideObservations,
    channel: &SideChannel,
    config: &BpConfig,
) -> Result<BpOutput> {
    if !(graph.q > 0.0 && graph.q <= graph.p) {
        return Err(Error::param("BP needs 0 < q <= p"));
    }
    let h = if config.use_side {
        side.node_llrs(channel)?
    } else {
        vec![0.0; graph.n]
    };
    let state = propagate(
        &graph.adjacency,
        &h,
        config.k as f64,
        graph.p,
        graph.q,
        config.nu,
        config.iterations,
    );
    let estimate = match config.selection {
        Selection::TopK => topk(&state.beliefs, config.k),
        Selection::Threshold => (0..graph.n)
            .filter(|&i| state.beliefs[i] >= config.nu)
            .collect(),
    };
    Ok(BpOutput {
        result: mismatch(graph, &estimate),
        state,
    })
}
