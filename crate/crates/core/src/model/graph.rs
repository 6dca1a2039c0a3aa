//! Planted single-community random graphs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{purpose, stream, StreamRng};

/// How the planted community size is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeMode {
    /// Exactly `K` nodes, chosen uniformly among all `K`-subsets.
    Deterministic,
    /// Each node planted independently with probability `K/n`.
    Binomial,
}

impl SizeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SizeMode::Deterministic => "deterministic",
            SizeMode::Binomial => "binomial",
        }
    }
}

impl std::str::FromStr for SizeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deterministic" | "det" => Ok(SizeMode::Deterministic),
            "binomial" | "bin" => Ok(SizeMode::Binomial),
            other => Err(Error::param(format!("unknown size mode {other:?}"))),
        }
    }
}

/// Undirected simple graph in compressed sparse row form. Each node's
/// neighbour list is sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    /// Build from undirected edges. Rejects self-loops, duplicates and ids
    /// outside `[0, n)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge ({u}, {v}) outside [0, {n})")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at node {u}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0usize; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        for i in 0..n {
            let row = &mut targets[offsets[i]..offsets[i + 1]];
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::param(format!("duplicate edge at node {i}")));
            }
        }
        Ok(Self { offsets, targets })
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    /// Number of directed edges, i.e. twice the edge count.
    pub fn num_directed(&self) -> usize {
        self.targets.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// CSR offsets; directed edges `offsets[i]..offsets[i+1]` leave node `i`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Targets of the directed edges, in CSR order.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    /// For each directed edge `e = (i -> j)`, the index of `(j -> i)`.
    pub fn reverse_edges(&self) -> Vec<usize> {
        let mut rev = vec![0usize; self.targets.len()];
        for i in 0..self.num_nodes() {
            let span = self.offsets[i]..self.offsets[i + 1];
            for (r, &j) in rev[span.clone()].iter_mut().zip(&self.targets[span]) {
                let pos = self
                    .neighbors(j)
                    .binary_search(&i)
                    .expect("adjacency is symmetric");
                *r = self.offsets[j] + pos;
            }
        }
        rev
    }

    /// Subgraph induced by `nodes` (which must be sorted and distinct), relabelled
    /// `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Adjacency {
        let mut local = vec![usize::MAX; self.num_nodes()];
        for (new, &old) in nodes.iter().enumerate() {
            local[old] = new;
        }
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for &old in nodes {
            // neighbour order is preserved because `nodes` is sorted
            targets.extend(
                self.neighbors(old)
                    .iter()
                    .map(|&v| local[v])
                    .filter(|&v| v != usize::MAX),
            );
            offsets.push(targets.len());
        }
        Adjacency { offsets, targets }
    }
}

/// A sampled planted-community graph together with its generating parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInstance {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub q: f64,
    pub size_mode: SizeMode,
    pub seed: u64,
    /// Planted node ids, sorted.
    pub community: Vec<usize>,
    pub membership: Vec<bool>,
    pub adjacency: Adjacency,
}

impl GraphInstance {
    /// Assemble an instance from explicit parts, e.g. a parsed file or a
    /// hand-built fixture.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n: usize,
        k: usize,
        p: f64,
        q: f64,
        size_mode: SizeMode,
        seed: u64,
        mut community: Vec<usize>,
        adjacency: Adjacency,
    ) -> Result<Self> {
        check_params(n, k, p, q)?;
        if adjacency.num_nodes() != n {
            return Err(Error::param(format!(
                "adjacency has {} nodes, expected {n}",
                adjacency.num_nodes()
            )));
        }
        community.sort_unstable();
        community.dedup();
        if community.last().is_some_and(|&c| c >= n) {
            return Err(Error::param("community id outside [0, n)"));
        }
        if size_mode == SizeMode::Deterministic && community.len() != k {
            return Err(Error::param(format!(
                "community has {} nodes, expected K = {k}",
                community.len()
            )));
        }
        let mut membership = vec![false; n];
        for &c in &community {
            membership[c] = true;
        }
        Ok(Self {
            n,
            k,
            p,
            q,
            size_mode,
            seed,
            community,
            membership,
            adjacency,
        })
    }

    pub fn is_member(&self, i: usize) -> bool {
        self.membership[i]
    }

    /// Realised community size (differs from `k` in binomial mode).
    pub fn community_size(&self) -> usize {
        self.community.len()
    }
}

fn check_params(n: usize, k: usize, p: f64, q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&p) || q > p {
        return Err(Error::param(format!(
            "need 0 <= q <= p <= 1, got p={p}, q={q}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::param(format!("need 0 < K <= n, got K={k}, n={n}")));
    }
    Ok(())
}

/// Sample a planted-community graph.
///
/// The community and the edges use separate streams of `seed`. Edges are drawn
/// by geometric skipping over pair indices: first the planted pairs at rate
/// `p`, then all pairs at rate `q` with planted-planted hits discarded.
pub fn generate_graph(
    n: usize,
    k: usize,
    p: f64,
    q: f64,
    size_mode: SizeMode,
    seed: u64,
) -> Result<GraphInstance> {
    check_params(n, k, p, q)?;
    let mut rng = stream(seed, purpose::GRAPH, 0);
    let community: Vec<usize> = match size_mode {
        SizeMode::Deterministic => {
            let mut c = rand::seq::index::sample(&mut rng, n, k).into_vec();
            c.sort_unstable();
            c
        }
        SizeMode::Binomial => {
            let rate = k as f64 / n as f64;
            (0..n).filter(|_| rng.random::<f64>() < rate).collect()
        }
    };
    let mut membership = vec![false; n];
    for &c in &community {
        membership[c] = true;
    }

    let mut rng = stream(seed, purpose::GRAPH, 1);
    let mut edges = Vec::new();
    let kc = community.len();
    for_each_sampled_pair(kc, p, &mut rng, |a, b| {
        edges.push((community[a], community[b]))
    });
    for_each_sampled_pair(n, q, &mut rng, |u, v| {
        if !(membership[u] && membership[v]) {
            edges.push((u, v));
        }
    });
    let adjacency = Adjacency::from_edges(n, &edges)?;
    Ok(GraphInstance {
        n,
        k,
        p,
        q,
        size_mode,
        seed,
        community,
        membership,
        adjacency,
    })
}

/// Visit each pair `(i, j)`, `i < j < m`, independently with probability `rate`.
/// Pairs are enumerated row by row; gaps between hits are geometric.
fn for_each_sampled_pair(
    m: usize,
    rate: f64,
    rng: &mut StreamRng,
    mut visit: impl FnMut(usize, usize),
) {
    if m < 2 || rate <= 0.0 {
        return;
    }
    let total = (m as u64) * (m as u64 - 1) / 2;
    let log_fail = (-rate).ln_1p();
    let mut idx: u64 = 0;
    let (mut row, mut row_start, mut row_len) = (0usize, 0u64, m as u64 - 1);
    loop {
        if rate < 1.0 {
            let u: f64 = rng.random();
            // 1 - u lies in (0, 1], so the log is finite
            let skip = ((1.0 - u).ln() / log_fail).floor();
            if skip >= (total - idx) as f64 {
                return;
            }
            idx += skip as u64;
        }
        if idx >= total {
            return;
        }
        while idx >= row_start + row_len {
            row_start += row_len;
            row += 1;
            row_len -= 1;
        }
        visit(row, row + 1 + (idx - row_start) as usize);
        idx += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_when_p_is_one() {
        let g = generate_graph(4, 4, 1.0, 0.0, SizeMode::Deterministic, 9).unwrap();
        assert_eq!(g.community, vec![0, 1, 2, 3]);
        assert_eq!(g.adjacency.num_edges(), 6);
        for i in 0..4 {
            assert_eq!(g.adjacency.degree(i), 3);
        }
    }

    #[test]
    fn pair_enumeration_is_exhaustive_at_rate_one() {
        let mut rng = stream(0, purpose::GRAPH, 0);
        let mut seen = Vec::new();
        for_each_sampled_pair(5, 1.0, &mut rng, |i, j| seen.push((i, j)));
        let expected: Vec<_> = (0..5)
            .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
            .collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_graph(10, 3, 0.1, 0.2, SizeMode::Deterministic, 0).is_err());
        assert!(generate_graph(10, 0, 0.2, 0.1, SizeMode::Deterministic, 0).is_err());
        assert!(generate_graph(10, 11, 0.2, 0.1, SizeMode::Deterministic, 0).is_err());
        assert!(generate_graph(10, 3, 1.2, 0.1, SizeMode::Deterministic, 0).is_err());
    }

    #[test]
    fn adjacency_invariants() {
        let g = generate_graph(300, 30, 0.3, 0.02, SizeMode::Deterministic, 5).unwrap();
        let adj = &g.adjacency;
        let rev = adj.reverse_edges();
        for i in 0..g.n {
            let row = adj.neighbors(i);
            assert!(row.windows(2).all(|w| w[0] < w[1]));
            assert!(!row.contains(&i));
            for &j in row {
                assert!(adj.has_edge(j, i));
            }
        }
        for (e, &r) in rev.iter().enumerate() {
            assert_eq!(rev[r], e);
        }
        assert_eq!(adj.edges().count(), adj.num_edges());
    }

    #[test]
    fn induced_subgraph_relabels() {
        let adj = Adjacency::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let sub = adj.induced(&[0, 2, 3, 4]);
        assert_eq!(sub.num_nodes(), 4);
        let edges: Vec<_> = sub.edges().collect();
        assert_eq!(edges, vec![(0, 3), (1, 2), (2, 3)]);
    }

    #[test]
    fn from_edges_rejects_malformed_input() {
        assert!(Adjacency::from_edges(3, &[(0, 0)]).is_err());
        assert!(Adjacency::from_edges(3, &[(0, 3)]).is_err());
        assert!(Adjacency::from_edges(3, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn reproducible_from_seed() {
        let a = generate_graph(2000, 50, 0.05, 0.002, SizeMode::Binomial, 77).unwrap();
        let b = generate_graph(2000, 50, 0.05, 0.002, SizeMode::Binomial, 77).unwrap();
        let c = generate_graph(2000, 50, 0.05, 0.002, SizeMode::Binomial, 78).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.adjacency, c.adjacency);
    }
}
