//! Per-node side observations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::channel::SideChannel;
use crate::model::graph::GraphInstance;
use crate::rng::{purpose, stream};

/// An `n x M` matrix of symbol indices, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideObservations {
    rows: usize,
    cols: usize,
    symbols: Vec<u16>,
}

impl SideObservations {
    /// Wrap a row-major symbol matrix, checking every index against `channel`.
    pub fn new(rows: usize, channel: &SideChannel, symbols: Vec<u16>) -> Result<Self> {
        let cols = channel.m();
        if symbols.len() != rows * cols {
            return Err(Error::Observation(format!(
                "expected {} symbols, got {}",
                rows * cols,
                symbols.len()
            )));
        }
        if cols > 0 {
            for (i, row) in symbols.chunks(cols).enumerate() {
                for (f, (&s, feature)) in row.iter().zip(channel.features()).enumerate() {
                    if s as usize >= feature.alphabet_size() {
                        return Err(Error::Observation(format!(
                            "node {i}, feature {f}: symbol {s} outside alphabet"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            symbols,
        })
    }

    /// Observations of an empty channel.
    pub fn empty(rows: usize) -> Self {
        Self {
            rows,
            cols: 0,
            symbols: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.symbols[i * self.cols..(i + 1) * self.cols]
    }

    /// Node LLRs `h_i` for every row.
    pub fn node_llrs(&self, channel: &SideChannel) -> Result<Vec<f64>> {
        if channel.m() != self.cols {
            return Err(Error::Observation(format!(
                "channel has {} features, observations have {} columns",
                channel.m(),
                self.cols
            )));
        }
        (0..self.rows)
            .map(|i| channel.node_llr(self.row(i)))
            .collect()
    }
}

/// Draw `y_{i,m}` from `alpha_plus` for planted nodes and `alpha_minus`
/// otherwise, independently across nodes and features.
pub fn sample_side_info(
    channel: &SideChannel,
    graph: &GraphInstance,
    seed: u64,
) -> Result<SideObservations> {
    sample_for_labels(channel, &graph.membership, seed)
}

/// As [`sample_side_info`] for an explicit label vector.
pub fn sample_for_labels(
    channel: &SideChannel,
    labels: &[bool],
    seed: u64,
) -> Result<SideObservations> {
    let mut rng = stream(seed, purpose::SIDE, 0);
    let mut symbols = Vec::with_capacity(labels.len() * channel.m());
    for &member in labels {
        for feature in channel.features() {
            symbols.push(draw_symbol(feature.likelihoods(member), rng.random()));
        }
    }
    Ok(SideObservations {
        rows: labels.len(),
        cols: channel.m(),
        symbols,
    })
}

/// Inverse-CDF draw. Zero-probability symbols are never returned.
pub(crate) fn draw_symbol(weights: &[f64], u: f64) -> u16 {
    let mut acc = 0.0;
    let mut last = 0;
    for (l, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        acc += w;
        last = l;
        if u < acc {
            return l as u16;
        }
    }
    // rounding left u above the accumulated total
    last as u16
}
