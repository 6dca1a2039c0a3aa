//! Monte Carlo over root LLRs of the Poisson tree.
//!
//! Roots are drawn per label, so the two error rates are estimated separately
//! and then mixed with the prior `K/n`. With `K/n = 1%` this costs the same
//! number of draws for each class instead of spending 99% of them on
//! non-members.
//!
//! Three samplers are available:
//! - `ExplicitTree` builds the whole tree and runs the recursion. Exact, but the
//!   tree has about `(nq)^depth` nodes.
//! - `LawChildren` draws the root's Poisson child counts and then each child's
//!   message from the numerical law of a depth `t - 1` subtree.
//! - `LawRoot` draws `Z` directly from the numerical law of the root.

use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::channel::SideChannel;
use crate::rng::{purpose, stream, StreamRng};
use crate::tree_de::law::{level_laws, LawOptions, LevelLaw};
use crate::tree_de::tree::{sample_tree_with_root, tree_llrs, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootSampler {
    ExplicitTree,
    LawChildren,
    LawRoot,
    /// Explicit trees while they stay small, child draws otherwise.
    #[default]
    Auto,
}

/// Expected tree size at which `Auto` stops building trees.
pub const AUTO_TREE_NODES: f64 = 2e4;

/// `Z` and `h` of sampled roots; the root LLR is `z + h`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSamples {
    pub z: Vec<f64>,
    pub h: Vec<f64>,
}

impl RootSamples {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn gamma(&self) -> impl Iterator<Item = f64> + '_ {
        self.z.iter().zip(&self.h).map(|(z, h)| z + h)
    }
}

/// Alias table over the atoms of a law.
struct AtomSampler {
    values: Vec<f64>,
    index: Option<WeightedAliasIndex<f64>>,
}

impl AtomSampler {
    fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (values, weights): (Vec<f64>, Vec<f64>) =
            atoms.into_iter().filter(|a| a.1 > 0.0).unzip();
        if values.is_empty() {
            return Err(Error::param("law has no mass"));
        }
        let index = if values.len() == 1 {
            None
        } else {
            Some(
                WeightedAliasIndex::new(weights).map_err(|e| Error::Numeric {
                    step: 0,
                    what: e.to_string(),
                })?,
            )
        };
        Ok(Self { values, index })
    }

    fn draw(&self, rng: &mut StreamRng) -> f64 {
        match &self.index {
            None => self.values[0],
            Some(ix) => self.values[ix.sample(rng)],
        }
    }
}

enum Engine {
    Explicit,
    /// Message samplers for member and non-member children.
    Children([AtomSampler; 2]),
    /// `Z` samplers by root label.
    Root([AtomSampler; 2]),
}

/// Sampler of root `(Z, h)` pairs for one configuration.
pub struct RootModel {
    params: TreeParams,
    channel: SideChannel,
    depth: usize,
    side: [AtomSampler; 2],
    engine: Engine,
}

fn expected_tree_size(params: &TreeParams, depth: usize) -> f64 {
    let branching = params
        .member_children(true)
        .max(params.member_children(false))
        + params.nonmember_children();
    (0..=depth).map(|d| branching.powi(d as i32)).sum()
}

impl RootModel {
    pub fn new(
        params: &TreeParams,
        channel: &SideChannel,
        depth: usize,
        sampler: RootSampler,
    ) -> Result<Self> {
        Self::with_options(params, channel, depth, sampler, &LawOptions::default())
    }

    /// As [`RootModel::new`], with explicit lattice options for the law-based samplers.
    pub fn with_options(
        params: &TreeParams,
        channel: &SideChannel,
        depth: usize,
        sampler: RootSampler,
        opts: &LawOptions,
    ) -> Result<Self> {
        let sampler = match sampler {
            RootSampler::Auto if expected_tree_size(params, depth) <= AUTO_TREE_NODES => {
                RootSampler::ExplicitTree
            }
            RootSampler::Auto => RootSampler::LawChildren,
            s => s,
        };
        let side = [
            AtomSampler::new(channel.llr_atoms(false))?,
            AtomSampler::new(channel.llr_atoms(true))?,
        ];
        let zero = || AtomSampler::new([(0.0, 1.0)]);
        let engine = match sampler {
            RootSampler::ExplicitTree | RootSampler::Auto => Engine::Explicit,
            RootSampler::LawChildren | RootSampler::LawRoot if depth == 0 => {
                Engine::Root([zero()?, zero()?])
            }
            RootSampler::LawChildren => {
                let below = level_laws(params, channel, depth - 1, opts, |_| Ok(()))?;
                let m = params.message_fn();
                let msg = |member: bool| {
                    AtomSampler::new(
                        below
                            .gamma(member)
                            .atoms()
                            .iter()
                            .map(|&(v, w)| (m.eval(v), w)),
                    )
                };
                Engine::Children([msg(false)?, msg(true)?])
            }
            RootSampler::LawRoot => {
                let top = level_laws(params, channel, depth, opts, |_| Ok(()))?;
                let [z0, z1] = top.z;
                Engine::Root([
                    AtomSampler::new(z0.atoms().to_vec())?,
                    AtomSampler::new(z1.atoms().to_vec())?,
                ])
            }
        };
        Ok(Self {
            params: *params,
            channel: channel.clone(),
            depth,
            side,
            engine,
        })
    }

    /// Root sampler over laws already computed for `depth`.
    pub fn from_level(
        params: &TreeParams,
        channel: &SideChannel,
        depth: usize,
        top: &LevelLaw,
    ) -> Result<Self> {
        let side = [
            AtomSampler::new(channel.llr_atoms(false))?,
            AtomSampler::new(channel.llr_atoms(true))?,
        ];
        let z = |l: usize| AtomSampler::new(top.z[l].atoms().iter().copied());
        Ok(Self {
            params: *params,
            channel: channel.clone(),
            depth,
            side,
            engine: Engine::Root([z(0)?, z(1)?]),
        })
    }

    fn draw_one(&self, member: bool, rng: &mut StreamRng) -> Result<(f64, f64)> {
        match &self.engine {
            Engine::Explicit => {
                let tree =
                    sample_tree_with_root(&self.params, &self.channel, self.depth, member, rng)?;
                let gamma = tree_llrs(&tree, &self.channel)?;
                let h = self.channel.node_llr(tree.symbols_of(0))?;
                let z = if self.depth == 0 {
                    0.0
                } else {
                    let m = self.params.message_fn();
                    tree.children(0).map(|c| m.eval(gamma[c])).sum::<f64>() - self.params.offset()
                };
                Ok((z, h))
            }
            Engine::Children(msg) => {
                let h = self.side[member as usize].draw(rng);
                let members = poisson(self.params.member_children(member), rng);
                let others = poisson(self.params.nonmember_children(), rng);
                let mut z = -self.params.offset();
                for _ in 0..members {
                    z += msg[1].draw(rng);
                }
                for _ in 0..others {
                    z += msg[0].draw(rng);
                }
                Ok((z, h))
            }
            Engine::Root(zs) => {
                let h = self.side[member as usize].draw(rng);
                Ok((zs[member as usize].draw(rng), h))
            }
        }
    }

    /// `count` roots with the given label. Root `i` uses its own stream, so
    /// the result does not depend on the thread count.
    pub fn sample(&self, member: bool, count: usize, seed: u64) -> Result<RootSamples> {
        let base = (member as u64) << 40;
        let pairs: Vec<(f64, f64)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, purpose::TREE_ROOTS, base | i as u64);
                self.draw_one(member, &mut rng)
            })
            .collect::<Result<_>>()?;
        let (z, h) = pairs.into_iter().unzip();
        Ok(RootSamples { z, h })
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

/// Root samples of one label drawn with `sampler`.
pub fn sample_root_llrs(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    member: bool,
    count: usize,
    seed: u64,
    sampler: RootSampler,
) -> Result<RootSamples> {
    RootModel::new(params, channel, depth, sampler)?.sample(member, count, seed)
}

/// Monte Carlo error of the MAP rule `Gamma >= nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapError {
    /// `(K/n) pe1 + (1 - K/n) pe0`.
    pub pe: f64,
    /// False-alarm rate `P(Gamma >= nu | non-member)`.
    pub pe0: f64,
    /// Miss rate `P(Gamma < nu | member)`.
    pub pe1: f64,
    pub stderr: f64,
    /// `n pe / K = pe1 + (n/K - 1) pe0`, the expected misclassified count over `K`.
    pub proxy: f64,
    pub proxy_stderr: f64,
    /// Roots drawn per label.
    pub trials: usize,
}

fn rate_and_var(hits: usize, trials: usize) -> (f64, f64) {
    let r = hits as f64 / trials as f64;
    (r, r * (1.0 - r) / trials as f64)
}

/// MAP error at `depth` from `trials` roots of each label.
pub fn tree_map_error(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    trials: usize,
    seed: u64,
    sampler: RootSampler,
) -> Result<MapError> {
    if trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    let model = RootModel::new(params, channel, depth, sampler)?;
    let nu = params.nu();
    let non = model.sample(false, trials, seed)?;
    let mem = model.sample(true, trials, seed)?;
    let (pe0, var0) = rate_and_var(non.gamma().filter(|&g| g >= nu).count(), trials);
    let (pe1, var1) = rate_and_var(mem.gamma().filter(|&g| g < nu).count(), trials);
    let prior = params.k / params.n;
    let weight = params.n / params.k - 1.0;
    Ok(MapError {
        pe: prior * pe1 + (1.0 - prior) * pe0,
        pe0,
        pe1,
        stderr: (prior * prior * var1 + (1.0 - prior).powi(2) * var0).sqrt(),
        proxy: pe1 + weight * pe0,
        proxy_stderr: (var1 + weight * weight * var0).sqrt(),
        trials,
    })
}

/// `1 / (e^{-x} + e^{-nu})`, with `x = +inf` mapped to `e^nu`.
pub fn b_integrand(x: f64, nu: f64) -> f64 {
    let en = (-nu).exp();
    if x == f64::INFINITY {
        1.0 / en
    } else {
        1.0 / ((-x).exp() + en)
    }
}

/// Sample mean and standard error of a sequence.
pub fn mean_and_stderr(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for x in values {
        count += 1;
        let d = x - mean;
        mean += d / count as f64;
        m2 += d * (x - mean);
    }
    if count < 2 {
        return (mean, f64::NAN);
    }
    (mean, (m2 / (count - 1) as f64 / count as f64).sqrt())
}

/// Monte Carlo `b_depth = E[1/(e^{-Gamma_1} + e^{-nu})]` with its standard error.
pub fn measure_b(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    trials: usize,
    seed: u64,
    sampler: RootSampler,
) -> Result<(f64, f64)> {
    let nu = params.nu();
    let s = sample_root_llrs(params, channel, depth, true, trials, seed, sampler)?;
    Ok(mean_and_stderr(s.gamma().map(|g| b_integrand(g, nu))))
}

/// `(pe0, pe1)` of the MAP rule from the numerical root laws.
pub fn law_map_error(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    opts: &LawOptions,
) -> Result<(f64, f64)> {
    let top = level_laws(params, channel, depth, opts, |_| Ok(()))?;
    let nu = params.nu();
    Ok((
        top.gamma_prob_ge(false, nu),
        1.0 - top.gamma_prob_ge(true, nu),
    ))
}

/// `b_t` for `t = 0..=depth` from the numerical laws.
pub fn law_b(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    opts: &LawOptions,
) -> Result<Vec<f64>> {
    let nu = params.nu();
    let mut b = Vec::with_capacity(depth + 1);
    level_laws(params, channel, depth, opts, |level| {
        b.push(level.gamma_expect(true, |x| b_integrand(x, nu)));
        Ok(())
    })?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::channel::{make_channel, ChannelKind};
    use approx::assert_relative_eq;

    #[test]
    fn no_signal_means_only_misses() {
        let params = TreeParams::new(100.0, 10.0, 0.05, 0.05).unwrap();
        let e = tree_map_error(
            &params,
            &SideChannel::empty(),
            2,
            50,
            1,
            RootSampler::ExplicitTree,
        )
        .unwrap();
        assert_eq!(e.pe0, 0.0);
        assert_eq!(e.pe1, 1.0);
        assert_relative_eq!(e.pe, 0.1, max_relative = 1e-12);
        assert_relative_eq!(e.proxy, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn perfect_side_information_means_no_errors() {
        let params = TreeParams::new(100.0, 10.0, 0.05, 0.02).unwrap();
        let ch = make_channel(&ChannelKind::Custom {
            plus: vec![vec![1.0, 0.0]],
            minus: vec![vec![0.0, 1.0]],
        })
        .unwrap();
        for sampler in [
            RootSampler::ExplicitTree,
            RootSampler::LawChildren,
            RootSampler::LawRoot,
        ] {
            let e = tree_map_error(&params, &ch, 2, 200, 3, sampler).unwrap();
            assert_eq!(e.pe, 0.0, "{sampler:?}");
        }
    }

    #[test]
    fn samplers_agree_on_small_trees() {
        let params = TreeParams::new(60.0, 6.0, 0.4, 0.04).unwrap();
        let ch = make_channel(&ChannelKind::NoisyLabel(0.2)).unwrap();
        let (law0, law1) = law_map_error(&params, &ch, 2, &LawOptions::default()).unwrap();
        for sampler in [
            RootSampler::ExplicitTree,
            RootSampler::LawChildren,
            RootSampler::LawRoot,
        ] {
            let e = tree_map_error(&params, &ch, 2, 20_000, 11, sampler).unwrap();
            let se0 = (law0 * (1.0 - law0) / 20_000.0).sqrt();
            let se1 = (law1 * (1.0 - law1) / 20_000.0).sqrt();
            assert!(
                (e.pe0 - law0).abs() <= 4.0 * se0 + 1e-3,
                "{sampler:?}: {} vs {law0}",
                e.pe0
            );
            assert!(
                (e.pe1 - law1).abs() <= 4.0 * se1 + 1e-3,
                "{sampler:?}: {} vs {law1}",
                e.pe1
            );
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let params = TreeParams::new(80.0, 8.0, 0.3, 0.05).unwrap();
        let ch = make_channel(&ChannelKind::NoisyLabel(0.3)).unwrap();
        let a = sample_root_llrs(&params, &ch, 2, true, 300, 5, RootSampler::Auto).unwrap();
        let b = sample_root_llrs(&params, &ch, 2, true, 300, 5, RootSampler::Auto).unwrap();
        assert_eq!(a, b);
        let c = sample_root_llrs(&params, &ch, 2, true, 300, 6, RootSampler::Auto).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn stderr_helper() {
        let (m, s) = mean_and_stderr([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert_relative_eq!(s, (5.0f64 / 3.0 / 4.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(
            b_integrand(f64::INFINITY, 2.0),
            2f64.exp(),
            max_relative = 1e-15
        );
        assert_eq!(b_integrand(f64::NEG_INFINITY, 2.0), 0.0);
    }
}
