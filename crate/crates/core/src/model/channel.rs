//! Finite-alphabet side-information channels.
//!
//! A channel is a list of conditionally independent features. Feature `m`
//! emits symbol `l` with probability `alpha_plus[l]` for community members and
//! `alpha_minus[l]` for everyone else.

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// One side-information feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    alpha_plus: Vec<f64>,
    alpha_minus: Vec<f64>,
}

impl Feature {
    pub fn new(alpha_plus: Vec<f64>, alpha_minus: Vec<f64>) -> Result<Self> {
        if alpha_plus.len() != alpha_minus.len() || alpha_plus.is_empty() {
            return Err(Error::param(
                "likelihood vectors must be non-empty and of equal length",
            ));
        }
        if alpha_plus.len() > u16::MAX as usize {
            return Err(Error::param("alphabet too large"));
        }
        for (name, v) in [("alpha_plus", &alpha_plus), ("alpha_minus", &alpha_minus)] {
            if v.iter().any(|&a| !(0.0..=1.0).contains(&a) || a.is_nan()) {
                return Err(Error::param(format!("{name} entries must lie in [0, 1]")));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::param(format!("{name} sums to {sum}, not 1")));
            }
        }
        Ok(Self {
            alpha_plus,
            alpha_minus,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alpha_plus.len()
    }

    pub fn alpha_plus(&self) -> &[f64] {
        &self.alpha_plus
    }

    pub fn alpha_minus(&self) -> &[f64] {
        &self.alpha_minus
    }

    /// Likelihood vector for a node with the given membership.
    pub fn likelihoods(&self, member: bool) -> &[f64] {
        if member {
            &self.alpha_plus
        } else {
            &self.alpha_minus
        }
    }

    /// LLR `log(alpha_plus / alpha_minus)` of a symbol. One-sided zero
    /// likelihoods give `+inf` / `-inf`.
    pub fn llr(&self, symbol: usize) -> Result<f64> {
        let (a, b) = match (self.alpha_plus.get(symbol), self.alpha_minus.get(symbol)) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                return Err(Error::Observation(format!(
                    "symbol {symbol} outside alphabet"
                )))
            }
        };
        match (a > 0.0, b > 0.0) {
            (true, true) => Ok(a.ln() - b.ln()),
            (true, false) => Ok(f64::INFINITY),
            (false, true) => Ok(f64::NEG_INFINITY),
            (false, false) => Err(Error::Observation(format!(
                "symbol {symbol} has zero likelihood under both labels"
            ))),
        }
    }

    /// `sum_l alpha_plus^2 / alpha_minus`, the expected likelihood ratio for a
    /// member. Infinite when a symbol has `alpha_minus = 0 < alpha_plus`.
    pub fn expected_ratio(&self) -> f64 {
        self.ratio_moment(2)
    }

    /// `E[e^{3 U_0}] = sum_l alpha_plus^3 / alpha_minus^2`.
    pub fn third_ratio_moment(&self) -> f64 {
        self.ratio_moment(3)
    }

    fn ratio_moment(&self, power: i32) -> f64 {
        self.alpha_plus
            .iter()
            .zip(&self.alpha_minus)
            .map(|(&a, &b)| {
                if a == 0.0 {
                    0.0
                } else if b == 0.0 {
                    f64::INFINITY
                } else {
                    a.powi(power) / b.powi(power - 1)
                }
            })
            .sum()
    }

    /// `D(V||U) = sum alpha_plus log(alpha_plus / alpha_minus)`.
    pub fn kl_plus_minus(&self) -> f64 {
        kl(&self.alpha_plus, &self.alpha_minus)
    }

    /// `D(U||V)`.
    pub fn kl_minus_plus(&self) -> f64 {
        kl(&self.alpha_minus, &self.alpha_plus)
    }

    /// `log sum_l w_l (alpha_plus / alpha_minus)^t` with weights `alpha_minus`
    /// (`under_plus = false`) or `alpha_plus` (`under_plus = true`).
    ///
    /// Symbols carrying zero weight are excluded. A zero or infinite ratio is
    /// raised to `t` with `0^0 = 1`, `0^{t>0} = 0`, `0^{t<0} = inf`.
    pub fn log_mgf(&self, t: f64, under_plus: bool) -> f64 {
        let weights = self.likelihoods(under_plus);
        let terms = weights.iter().enumerate().map(|(l, &w)| {
            let (a, b) = (self.alpha_plus[l], self.alpha_minus[l]);
            let log_ratio = if w == 0.0 {
                0.0
            } else if a == 0.0 {
                f64::NEG_INFINITY
            } else if b == 0.0 {
                f64::INFINITY
            } else {
                a.ln() - b.ln()
            };
            (w, log_ratio)
        });
        crate::model::llr::log_mgf(terms, t)
    }

    pub fn is_uninformative(&self) -> bool {
        self.alpha_plus == self.alpha_minus
    }
}

fn kl(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            if x == 0.0 {
                0.0
            } else if y == 0.0 {
                f64::INFINITY
            } else {
                x * (x.ln() - y.ln())
            }
        })
        .sum()
}

/// Channel constructors understood by [`make_channel`].
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    /// No side information (`M = 0`).
    Empty,
    /// Binary label observed through a symmetric flip with probability `alpha`.
    NoisyLabel(f64),
    /// Label revealed with probability `1 - eps`, erased otherwise.
    /// Symbols: 0 = revealed member, 1 = revealed non-member, 2 = erased.
    PartialReveal(f64),
    /// Explicit per-feature likelihood rows.
    Custom {
        plus: Vec<Vec<f64>>,
        minus: Vec<Vec<f64>>,
    },
    /// The features of `base`, repeated `copies` times.
    Replicated(Box<ChannelKind>, usize),
}

/// A set of conditionally independent features.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SideChannel {
    features: Vec<Feature>,
}

impl SideChannel {
    pub fn new(features: Vec<Feature>) -> Self {
        Self { features }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Number of features `M`.
    pub fn m(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    /// Node LLR `h = sum_m log(alpha_plus^m(y_m) / alpha_minus^m(y_m))`.
    ///
    /// Returns an error for symbols outside an alphabet, symbols impossible
    /// under both labels, or rows containing both a `+inf` and a `-inf` symbol.
    pub fn node_llr(&self, row: &[u16]) -> Result<f64> {
        if row.len() != self.features.len() {
            return Err(Error::Observation(format!(
                "row has {} symbols, channel has {} features",
                row.len(),
                self.features.len()
            )));
        }
        let mut sum = crate::model::llr::LlrSum::default();
        for (feature, &symbol) in self.features.iter().zip(row) {
            sum.add(feature.llr(symbol as usize)?);
        }
        sum.value_strict()
    }

    /// `Lambda`: product over features of the expected likelihood ratio.
    pub fn lambda_side(&self) -> f64 {
        self.features.iter().map(Feature::expected_ratio).product()
    }

    /// `Lambda' = E[e^{3 U_0}]`, product over features.
    pub fn lambda_prime(&self) -> f64 {
        self.features
            .iter()
            .map(Feature::third_ratio_moment)
            .product()
    }

    /// `sum_m D(V_m || U_m)`.
    pub fn kl_plus_minus(&self) -> f64 {
        self.features.iter().map(Feature::kl_plus_minus).sum()
    }

    /// `sum_m D(U_m || V_m)`.
    pub fn kl_minus_plus(&self) -> f64 {
        self.features.iter().map(Feature::kl_minus_plus).sum()
    }

    /// Sum of per-feature log-MGFs; see [`Feature::log_mgf`].
    pub fn log_mgf(&self, t: f64, under_plus: bool) -> f64 {
        self.features.iter().map(|f| f.log_mgf(t, under_plus)).sum()
    }

    /// Distribution of the node LLR given membership, as `(value, probability)`
    /// atoms sorted by value with equal values merged.
    pub fn llr_atoms(&self, member: bool) -> Vec<(f64, f64)> {
        let mut atoms = vec![(0.0_f64, 1.0_f64)];
        for feature in &self.features {
            let weights = feature.likelihoods(member);
            let mut next = Vec::with_capacity(atoms.len() * weights.len());
            for (l, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let h = feature
                    .llr(l)
                    .expect("positive-weight symbol has a defined LLR");
                next.extend(atoms.iter().map(|&(v, p)| (v + h, p * w)));
            }
            next.sort_by(|a, b| a.0.total_cmp(&b.0));
            atoms.clear();
            for (v, p) in next {
                match atoms.last_mut() {
                    Some(last) if last.0 == v => last.1 += p,
                    _ => atoms.push((v, p)),
                }
            }
        }
        atoms
    }

    pub fn is_uninformative(&self) -> bool {
        self.features.iter().all(Feature::is_uninformative)
    }
}

/// Build a channel from its kind, validating parameters.
pub fn make_channel(kind: &ChannelKind) -> Result<SideChannel> {
    match kind {
        ChannelKind::Empty => Ok(SideChannel::empty()),
        &ChannelKind::NoisyLabel(alpha) => {
            if !(alpha > 0.0 && alpha < 0.5) {
                return Err(Error::param(format!(
                    "noisy-label alpha must lie in (0, 0.5), got {alpha}"
                )));
            }
            let f = Feature::new(vec![1.0 - alpha, alpha], vec![alpha, 1.0 - alpha])?;
            Ok(SideChannel::new(vec![f]))
        }
        &ChannelKind::PartialReveal(eps) => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::param(format!(
                    "erasure probability must lie in (0, 1), got {eps}"
                )));
            }
            let f = Feature::new(vec![1.0 - eps, 0.0, eps], vec![0.0, 1.0 - eps, eps])?;
            Ok(SideChannel::new(vec![f]))
        }
        ChannelKind::Custom { plus, minus } => {
            if plus.len() != minus.len() {
                return Err(Error::param(
                    "custom channel needs one alpha_minus row per alpha_plus row",
                ));
            }
            let features = plus
                .iter()
                .zip(minus)
                .map(|(a, b)| Feature::new(a.clone(), b.clone()))
                .collect::<Result<Vec<_>>>()?;
            Ok(SideChannel::new(features))
        }
        ChannelKind::Replicated(base, copies) => {
            let base = make_channel(base)?;
            let features = (0..*copies)
                .flat_map(|_| base.features.iter().cloned())
                .collect();
            Ok(SideChannel::new(features))
        }
    }
}
