//! Numerical laws of the tree LLR, level by level.
//!
//! For a node whose subtree has `d` levels below it, write `Z_d` for the sum
//! `-K(p - q) + sum_children M(Gamma_child)` and `Gamma_d = h + Z_d`. Given the
//! node's label, the children contributions form a compound Poisson sum with
//! member jumps `M(Gamma_{d-1} | member)` at rate `K p` or `K q` and
//! non-member jumps `M(Gamma_{d-1} | non-member)` at rate `(n - K) q`.
//!
//! Jumps lie in `[0, log(p/q)]`. They are placed on a lattice of `resolution`
//! cells across that range by splitting each atom between its two neighbouring
//! lattice points in proportion to distance, which keeps the mean exact. The
//! compound sum is then evaluated through its characteristic function with one
//! FFT per root label. The lattice adds at most `rate * spacing^2 / 4` to the
//! variance, and functionals such as `E[e^Gamma]` are sensitive to it, so large
//! degrees want a fine lattice.
//!
//! This replaces explicit tree enumeration, which is hopeless once degrees are
//! in the hundreds: a depth-4 tree with 5000 children per node has `10^14`
//! nodes.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::channel::SideChannel;
use crate::tree_de::tree::TreeParams;

/// A discrete law as `(value, probability)` atoms sorted by value. Values may
/// be infinite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Law {
    atoms: Vec<(f64, f64)>,
}

impl Law {
    pub fn point(x: f64) -> Self {
        Self {
            atoms: vec![(x, 1.0)],
        }
    }

    /// Sorts, merges equal values and drops zero weights.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => merged.push((v, w)),
            }
        }
        Self { atoms: merged }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// `E[f(X)]`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(v, w)| w * f(v)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|x| (x - m) * (x - m))
    }

    /// `P(X >= x)`.
    pub fn prob_ge(&self, x: f64) -> f64 {
        let from = self.atoms.partition_point(|a| a.0 < x);
        self.atoms[from..].iter().map(|a| a.1).sum()
    }

    /// Law of `X + Y` for independent `X ~ self`, `Y ~ other` where `other` has
    /// few atoms.
    pub fn convolve_small(&self, other: &Law) -> Law {
        let mut out = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for &(y, wy) in &other.atoms {
            out.extend(self.atoms.iter().map(|&(x, wx)| (x + y, wx * wy)));
        }
        Law::from_atoms(out)
    }
}

/// Laws at one subtree height, indexed by label (`[non-member, member]`).
///
/// `Gamma = Z + h` with `Z` and `h` independent given the label; it is kept in
/// that factored form because `h` usually has a handful of atoms while `Z`
/// may have millions.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelLaw {
    pub z: [Law; 2],
    pub h: [Law; 2],
}

impl LevelLaw {
    /// `E[f(Gamma) | label]`.
    pub fn gamma_expect(&self, member: bool, f: impl Fn(f64) -> f64) -> f64 {
        let l = member as usize;
        self.h[l]
            .atoms()
            .iter()
            .map(|&(h, wh)| wh * self.z[l].expect(|z| f(z + h)))
            .sum()
    }

    /// `P(Gamma >= x | label)`.
    pub fn gamma_prob_ge(&self, member: bool, x: f64) -> f64 {
        let l = member as usize;
        self.h[l]
            .atoms()
            .iter()
            .map(|&(h, wh)| wh * self.z[l].prob_ge(x - h))
            .sum()
    }

    /// The law of `Gamma` given the label, materialised.
    pub fn gamma(&self, member: bool) -> Law {
        let l = member as usize;
        self.z[l].convolve_small(&self.h[l])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawOptions {
    /// Lattice cells across `[0, log(p/q)]`.
    pub resolution: usize,
    /// Standard deviations of the compound sum kept on each side of its mean.
    pub tail_sds: f64,
    /// Atoms lighter than this are dropped. FFT round-off sits far below the
    /// default, so this mostly trims the empty ends of the window.
    pub prune: f64,
}

impl Default for LawOptions {
    fn default() -> Self {
        Self {
            resolution: 4096,
            tail_sds: 10.0,
            prune: 1e-20,
        }
    }
}

/// Laws for subtree heights `0..=depth`, all kept.
pub fn subtree_laws(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    opts: &LawOptions,
) -> Result<Vec<LevelLaw>> {
    let mut levels = Vec::with_capacity(depth + 1);
    let top = level_laws(params, channel, depth, opts, |level| {
        levels.push(level.clone());
        Ok(())
    })?;
    levels.pop();
    levels.push(top);
    Ok(levels)
}

/// Build the laws for heights `0..=depth`, passing each to `visit` before it is
/// dropped, and return the last one. Only two levels are alive at a time.
pub fn level_laws(
    params: &TreeParams,
    channel: &SideChannel,
    depth: usize,
    opts: &LawOptions,
    mut visit: impl FnMut(&LevelLaw) -> Result<()>,
) -> Result<LevelLaw> {
    if opts.resolution < 2 {
        return Err(Error::param("lattice resolution must be at least 2"));
    }
    let h = [
        Law::from_atoms(channel.llr_atoms(false)),
        Law::from_atoms(channel.llr_atoms(true)),
    ];
    let mut level = LevelLaw {
        z: [Law::point(0.0), Law::point(0.0)],
        h,
    };
    let mut planner = FftPlanner::new();
    for d in 0..depth {
        visit(&level)?;
        level = next_level(params, &level, opts, &mut planner).map_err(|e| match e {
            Error::Numeric { what, .. } => Error::Numeric { step: d + 1, what },
            other => other,
        })?;
    }
    visit(&level)?;
    Ok(level)
}

/// Lattice mass of `M(Gamma_child)` for each child label.
struct Jumps {
    spacing: f64,
    mass: [Vec<f64>; 2],
    mean: [f64; 2],
    second: [f64; 2],
}

fn lattice_jumps(params: &TreeParams, below: &LevelLaw, opts: &LawOptions) -> Jumps {
    let m = params.message_fn();
    let cells = opts.resolution;
    let spacing = m.saturation() / cells as f64;
    let mut mass = [vec![0.0; cells + 1], vec![0.0; cells + 1]];
    let mut mean = [0.0; 2];
    let mut second = [0.0; 2];
    for label in 0..2 {
        let bins = &mut mass[label];
        for &(h, wh) in below.h[label].atoms() {
            for &(z, wz) in below.z[label].atoms() {
                let w = wh * wz;
                let x = (m.eval(z + h) / spacing).clamp(0.0, cells as f64);
                let lo = (x.floor() as usize).min(cells - 1);
                let frac = x - lo as f64;
                bins[lo] += w * (1.0 - frac);
                bins[lo + 1] += w * frac;
            }
        }
        for (j, &w) in bins.iter().enumerate() {
            let y = j as f64 * spacing;
            mean[label] += w * y;
            second[label] += w * y * y;
        }
    }
    Jumps {
        spacing,
        mass,
        mean,
        second,
    }
}

fn next_level(
    params: &TreeParams,
    below: &LevelLaw,
    opts: &LawOptions,
    planner: &mut FftPlanner<f64>,
) -> Result<LevelLaw> {
    let offset = params.offset();
    let h = below.h.clone();
    if params.p == params.q {
        return Ok(LevelLaw {
            z: [Law::point(-offset), Law::point(-offset)],
            h,
        });
    }
    let jumps = lattice_jumps(params, below, opts);
    let cells = opts.resolution;
    let s = jumps.spacing;
    let rates = |member: bool| [params.nonmember_children(), params.member_children(member)];

    // one window, in lattice units, covering both root labels
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for member in [false, true] {
        let r = rates(member);
        let mean = (r[0] * jumps.mean[0] + r[1] * jumps.mean[1]) / s;
        let sd = (r[0] * jumps.second[0] + r[1] * jumps.second[1]).sqrt() / s;
        lo = lo.min(mean - opts.tail_sds * sd - 2.0 * cells as f64);
        hi = hi.max(mean + opts.tail_sds * sd + 2.0 * cells as f64);
    }
    let lo = lo.floor().max(0.0) as usize;
    let hi = hi.ceil() as usize;
    let size = (hi - lo + 1).max(2 * cells + 2).next_power_of_two();

    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    let mut transforms = Vec::with_capacity(2);
    for label in 0..2 {
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        for (slot, &w) in buf.iter_mut().zip(&jumps.mass[label]) {
            *slot = Complex64::new(w, 0.0);
        }
        fft.process(&mut buf);
        let total: f64 = jumps.mass[label].iter().sum();
        for b in buf.iter_mut() {
            *b -= total;
        }
        transforms.push(buf);
    }

    let norm = 1.0 / size as f64;
    let mut z = [Law::default(), Law::default()];
    let mut work = vec![Complex64::new(0.0, 0.0); size];
    for member in [false, true] {
        let r = rates(member);
        for (k, slot) in work.iter_mut().enumerate() {
            *slot = (r[0] * transforms[0][k] + r[1] * transforms[1][k]).exp();
        }
        ifft.process(&mut work);
        // lattice point L sits at index L mod size; walk L upward so atoms come out sorted
        let mut atoms = Vec::with_capacity(size);
        for l in lo..lo + size {
            let w = work[l % size].re * norm;
            if w > opts.prune {
                atoms.push((l as f64 * s - offset, w));
            }
        }
        let law = Law { atoms };
        let mass = law.total_mass();
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Numeric {
                step: 0,
                what: format!("compound law lost mass: total {mass}"),
            });
        }
        z[member as usize] = law;
    }
    Ok(LevelLaw { z, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::channel::{make_channel, ChannelKind};
    use approx::assert_relative_eq;

    #[test]
    fn level_zero_is_the_side_llr() {
        let params = TreeParams::new(1000.0, 10.0, 0.5, 0.1).unwrap();
        let ch = make_channel(&ChannelKind::NoisyLabel(0.1)).unwrap();
        let laws = subtree_laws(&params, &ch, 0, &LawOptions::default()).unwrap();
        let g1 = laws[0].gamma(true);
        assert_eq!(g1.atoms().len(), 2);
        assert_relative_eq!(g1.atoms()[1].0, 9f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(g1.atoms()[1].1, 0.9);
        assert_relative_eq!(laws[0].gamma_prob_ge(true, 0.0), 0.9);
    }

    #[test]
    fn compound_moments_match_closed_form() {
        // one level above the leaves: Z = -K(p-q) + sum of M(h) jumps
        let params = TreeParams::new(2000.0, 20.0, 0.5, 0.05).unwrap();
        let ch = make_channel(&ChannelKind::NoisyLabel(0.2)).unwrap();
        let laws = subtree_laws(&params, &ch, 1, &LawOptions::default()).unwrap();
        let m = params.message_fn();
        let h = [ch.llr_atoms(false), ch.llr_atoms(true)];
        let jump_moment = |label: usize, power: i32| {
            h[label]
                .iter()
                .map(|&(v, w)| w * m.eval(v).powi(power))
                .sum::<f64>()
        };
        for member in [false, true] {
            let rate1 = params.member_children(member);
            let rate0 = params.nonmember_children();
            let mean = -params.offset() + rate1 * jump_moment(1, 1) + rate0 * jump_moment(0, 1);
            let var = rate1 * jump_moment(1, 2) + rate0 * jump_moment(0, 2);
            let z = &laws[1].z[member as usize];
            assert_relative_eq!(z.mean(), mean, max_relative = 1e-9, epsilon = 1e-9);
            // the lattice inflates the variance by at most rate * spacing^2 / 4
            let spacing = m.saturation() / 4096.0;
            assert!((z.variance() - var).abs() <= (rate0 + rate1) * spacing * spacing / 4.0 + 1e-9);
            assert_relative_eq!(z.total_mass(), 1.0, max_relative = 1e-9);
            assert!(z.atoms().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn factored_gamma_matches_materialised() {
        let params = TreeParams::new(500.0, 10.0, 0.4, 0.05).unwrap();
        let ch = make_channel(&ChannelKind::PartialReveal(0.3)).unwrap();
        let laws = subtree_laws(
            &params,
            &ch,
            2,
            &LawOptions {
                resolution: 512,
                ..Default::default()
            },
        )
        .unwrap();
        for member in [false, true] {
            let g = laws[2].gamma(member);
            for x in [-3.0, 0.0, 1.5, 4.0] {
                assert_relative_eq!(
                    g.prob_ge(x),
                    laws[2].gamma_prob_ge(member, x),
                    max_relative = 1e-12,
                    epsilon = 1e-15
                );
            }
            let f = |x: f64| 1.0 / (1.0 + (-x).exp());
            assert_relative_eq!(
                g.expect(f),
                laws[2].gamma_expect(member, f),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn streaming_agrees_with_collected() {
        let params = TreeParams::new(300.0, 10.0, 0.5, 0.05).unwrap();
        let ch = make_channel(&ChannelKind::NoisyLabel(0.25)).unwrap();
        let opts = LawOptions {
            resolution: 256,
            ..Default::default()
        };
        let all = subtree_laws(&params, &ch, 3, &opts).unwrap();
        let mut seen = 0;
        let top = level_laws(&params, &ch, 3, &opts, |l| {
            assert_eq!(l, &all[seen]);
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, 4);
        assert_eq!(top, all[3]);
    }

    #[test]
    fn no_signal_collapses() {
        let params = TreeParams::new(100.0, 10.0, 0.2, 0.2).unwrap();
        let laws = subtree_laws(&params, &SideChannel::empty(), 3, &LawOptions::default()).unwrap();
        assert_eq!(laws[3].gamma(true), Law::point(0.0));
    }

    #[test]
    fn law_helpers() {
        let l = Law::from_atoms(vec![(1.0, 0.25), (0.0, 0.5), (1.0, 0.25), (5.0, 0.0)]);
        assert_eq!(l.atoms(), &[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(l.prob_ge(0.5), 0.5);
        assert_eq!(l.prob_ge(0.0), 1.0);
        assert_eq!(l.mean(), 0.5);
        assert_eq!(l.variance(), 0.25);
        let c = l.convolve_small(&Law::from_atoms(vec![(f64::INFINITY, 0.5), (0.0, 0.5)]));
        assert_eq!(c.prob_ge(f64::INFINITY), 0.5);
    }
}
