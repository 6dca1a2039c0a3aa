//! Edge log-likelihood ratios and an accumulator for sums with infinite terms.

use crate::error::{Error, Result};

/// `log(p/q)` for a present edge, `log((1-p)/(1-q))` for an absent one.
///
/// Computed as a difference of logs so that swapping `p` and `q` negates the
/// result exactly. `q = 0` with a present edge gives `+inf`; `p = 1` with an
/// absent edge gives `-inf`.
pub fn edge_llr(p: f64, q: f64, present: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::param(format!(
            "edge probabilities must lie in [0, 1], got p={p}, q={q}"
        )));
    }
    if present {
        log_ratio(p, q)
    } else {
        // ln_1p keeps precision for the small p, q of sparse graphs
        match (p < 1.0, q < 1.0) {
            (true, true) => Ok((-p).ln_1p() - (-q).ln_1p()),
            (true, false) => Ok(f64::INFINITY),
            (false, true) => Ok(f64::NEG_INFINITY),
            (false, false) => Err(Error::Observation(
                "absent edge impossible under both models".into(),
            )),
        }
    }
}

fn log_ratio(a: f64, b: f64) -> Result<f64> {
    match (a > 0.0, b > 0.0) {
        (true, true) => Ok(a.ln() - b.ln()),
        (true, false) => Ok(f64::INFINITY),
        (false, true) => Ok(f64::NEG_INFINITY),
        (false, false) => Err(Error::Observation(
            "present edge impossible under both models".into(),
        )),
    }
}

/// `log sum_l w_l e^{t r_l}` for a probability vector `w` and log-ratios `r`,
/// evaluated as `log1p(sum_l w_l expm1(t r_l))` so that it is exactly zero at
/// `t = 0` and keeps precision when the sum is close to one. Zero weights are
/// skipped; `t * (+-inf)` follows `0 * inf = 0`.
pub(crate) fn log_mgf(terms: impl IntoIterator<Item = (f64, f64)>, t: f64) -> f64 {
    let mut acc = 0.0;
    for (w, r) in terms {
        if w == 0.0 || t == 0.0 {
            continue;
        }
        acc += w * (t * r).exp_m1();
    }
    if acc <= -1.0 {
        // all mass annihilated; rounding may push the sum past -1
        f64::NEG_INFINITY
    } else {
        acc.ln_1p()
    }
}

/// Running sum of LLR terms where infinite terms are tracked separately, so
/// that `+inf + -inf` is reported instead of silently becoming NaN.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LlrSum {
    finite: f64,
    pos_inf: bool,
    neg_inf: bool,
}

impl LlrSum {
    pub fn add(&mut self, x: f64) {
        if x == f64::INFINITY {
            self.pos_inf = true;
        } else if x == f64::NEG_INFINITY {
            self.neg_inf = true;
        } else {
            self.finite += x;
        }
    }

    /// Sum with a conflict (both infinities) resolved to `-inf`: a candidate
    /// containing an impossible configuration has zero likelihood.
    pub fn value(&self) -> f64 {
        if self.neg_inf {
            f64::NEG_INFINITY
        } else if self.pos_inf {
            f64::INFINITY
        } else {
            self.finite
        }
    }

    /// Sum, or an error when both infinities occurred.
    pub fn value_strict(&self) -> Result<f64> {
        if self.pos_inf && self.neg_inf {
            Err(Error::Observation(
                "observation is impossible under both labels".into(),
            ))
        } else {
            Ok(self.value())
        }
    }
}

impl Extend<f64> for LlrSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_relative_eq!(
            edge_llr(0.5, 0.25, true).unwrap(),
            2f64.ln(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            edge_llr(5e-3, 5e-4, false).unwrap(),
            (0.995f64 / 0.9995).ln(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            edge_llr(5e-3, 5e-4, false).unwrap(),
            -0.004512417,
            max_relative = 1e-6
        );
        assert_eq!(edge_llr(0.3, 0.3, true).unwrap(), 0.0);
        assert_eq!(edge_llr(0.3, 0.3, false).unwrap(), 0.0);
    }

    #[test]
    fn infinite_cases() {
        assert_eq!(edge_llr(0.5, 0.0, true).unwrap(), f64::INFINITY);
        assert_eq!(edge_llr(1.0, 0.5, false).unwrap(), f64::NEG_INFINITY);
        assert!(edge_llr(0.0, 0.0, true).is_err());
        assert!(edge_llr(1.5, 0.0, true).is_err());
    }

    #[test]
    fn sum_handles_infinities() {
        let mut s = LlrSum::default();
        s.extend([1.0, 2.0]);
        assert_eq!(s.value(), 3.0);
        s.add(f64::INFINITY);
        assert_eq!(s.value(), f64::INFINITY);
        s.add(f64::NEG_INFINITY);
        assert_eq!(s.value(), f64::NEG_INFINITY);
        assert!(s.value_strict().is_err());
    }

    proptest! {
        #[test]
        fn antisymmetric_under_swap(p in 1e-6f64..0.999, q in 1e-6f64..0.999, present: bool) {
            let a = edge_llr(p, q, present).unwrap();
            let b = edge_llr(q, p, present).unwrap();
            prop_assert_eq!(a, -b);
        }
    }
}
