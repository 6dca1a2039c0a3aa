//! The labelled Poisson tree with side information and its exact LLR recursion.
//!
//! A member (label 1) has `Poi(Kp)` member children, a non-member has
//! `Poi(Kq)` member children, and every node has `Poi((n-K)q)` non-member
//! children. The root is a member with probability `K/n`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::detectors::bp::MessageFn;
use crate::error::{Error, Result};
use crate::model::channel::SideChannel;
use crate::model::side::draw_symbol;
use crate::rng::{purpose, stream, StreamRng};

/// Largest tree [`sample_tree`] will build.
pub const NODE_CAP: usize = 10_000_000;

/// Population parameters shared by the tree model and density evolution.
/// `n` and `k` are reals so that the limits of large populations can be probed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub n: f64,
    pub k: f64,
    pub p: f64,
    pub q: f64,
}

impl TreeParams {
    pub fn new(n: f64, k: f64, p: f64, q: f64) -> Result<Self> {
        if !(k > 0.0 && k < n && n.is_finite()) {
            return Err(Error::param(format!("need 0 < K < n, got K={k}, n={n}")));
        }
        if !(q > 0.0 && q <= p && p <= 1.0) {
            return Err(Error::param(format!(
                "need 0 < q <= p <= 1, got p={p}, q={q}"
            )));
        }
        Ok(Self { n, k, p, q })
    }

    /// Parameters with `n/K = ratio`, `Kq = kq` and signal-to-noise ratio `lambda`.
    pub fn from_degrees(ratio: f64, kq: f64, lambda: f64, k: f64) -> Result<Self> {
        if !(ratio > 1.0 && kq > 0.0 && lambda >= 0.0) {
            return Err(Error::param("need n/K > 1, Kq > 0, lambda >= 0"));
        }
        // lambda = (Kp - Kq)^2 / ((n/K - 1) Kq)
        let kp = kq + (lambda * (ratio - 1.0) * kq).sqrt();
        Self::new(ratio * k, k, kp / k, kq / k)
    }

    pub fn nu(&self) -> f64 {
        (self.n - self.k).ln() - self.k.ln()
    }

    pub fn lambda(&self) -> f64 {
        crate::model::metrics::lambda_snr(self.n, self.k, self.p, self.q)
    }

    /// Mean number of member children of a node with the given label.
    pub fn member_children(&self, member: bool) -> f64 {
        self.k * if member { self.p } else { self.q }
    }

    /// Mean number of non-member children, `(n - K) q`.
    pub fn nonmember_children(&self) -> f64 {
        (self.n - self.k) * self.q
    }

    /// `K (p - q)`, subtracted once per recursion level.
    pub fn offset(&self) -> f64 {
        self.k * (self.p - self.q)
    }

    pub fn message_fn(&self) -> MessageFn {
        MessageFn::new(self.p, self.q, self.nu())
    }
}

/// A sampled tree in breadth-first layout: node 0 is the root and the children
/// of node `i` are `child_start[i]..child_start[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeInstance {
    pub depth: usize,
    pub params: TreeParams,
    pub labels: Vec<bool>,
    /// Side symbols, `m` per node, row-major.
    pub symbols: Vec<u16>,
    pub m: usize,
    pub child_start: Vec<usize>,
    /// `level_start[d]..level_start[d + 1]` are the nodes at depth `d`.
    pub level_start: Vec<usize>,
}

impl TreeInstance {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn children(&self, i: usize) -> std::ops::Range<usize> {
        self.child_start[i]..self.child_start[i + 1]
    }

    pub fn symbols_of(&self, i: usize) -> &[u16] {
        &self.symbols[i * self.m..(i + 1) * self.m]
    }

    pub fn root_label(&self) -> bool {
        self.labels[0]
    }
}

fn poisson(mean: f64, rng: &mut StreamRng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng) as usize
}

/// Sample a depth-`depth` tree, root label included, from stream `seed`.
pub fn sample_tree(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    seed: u64,
) -> Result<TreeInstance> {
    let mut rng = stream(seed, purpose::TREE, 0);
    let root = rng.random::<f64>() < params.k / params.n;
    sample_tree_with_root(params, channel, depth, root, &mut rng)
}

/// Sample a tree whose root label is fixed.
pub fn sample_tree_with_root(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    root: bool,
    rng: &mut StreamRng,
) -> Result<TreeInstance> {
    let m = channel.m();
    let mut labels = vec![root];
    let mut child_start = Vec::new();
    let mut level_start = vec![0, 1];
    for d in 0..depth {
        let (lo, hi) = (level_start[d], level_start[d + 1]);
        for i in lo..hi {
            child_start.push(labels.len());
            let members = poisson(params.member_children(labels[i]), rng);
            let others = poisson(params.nonmember_children(), rng);
            if labels.len() + members + others > NODE_CAP {
                return Err(Error::TreeTruncated {
                    cap: NODE_CAP,
                    depth: d + 1,
                });
            }
            labels.extend(std::iter::repeat_n(true, members));
            labels.extend(std::iter::repeat_n(false, others));
        }
        level_start.push(labels.len());
    }
    // nodes at the last level have no children
    child_start.resize(labels.len() + 1, labels.len());
    let mut symbols = Vec::with_capacity(labels.len() * m);
    for &label in &labels {
        for f in channel.features() {
            symbols.push(draw_symbol(f.likelihoods(label), rng.random()));
        }
    }
    Ok(TreeInstance {
        depth,
        params: *params,
        labels,
        symbols,
        m,
        child_start,
        level_start,
    })
}

/// `Gamma` of every node, by leaf-to-root dynamic programming.
///
/// Nodes at the last level take `Gamma = h`; every other node takes
/// `h - K(p - q) + sum_children M(Gamma_child)`.
pub fn tree_llrs(tree: &TreeInstance, channel: &SideChannel) -> Result<Vec<f64>> {
    let m = tree.params.message_fn();
    let offset = tree.params.offset();
    let leaves_from = tree.level_start[tree.depth];
    let mut gamma = vec![0.0; tree.len()];
    for i in (0..tree.len()).rev() {
        let h = channel.node_llr(tree.symbols_of(i))?;
        gamma[i] = if i >= leaves_from {
            h
        } else {
            h - offset + tree.children(i).map(|c| m.eval(gamma[c])).sum::<f64>()
        };
    }
    Ok(gamma)
}

/// Root LLR `Gamma_0` of the tree.
pub fn tree_llr(tree: &TreeInstance, channel: &SideChannel) -> Result<f64> {
    Ok(tree_llrs(tree, channel)?[0])
}
