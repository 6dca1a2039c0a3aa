//! Regions of the `(b, c)` plane for the family `p = 2q`, `q = b log^2 n / n`,
//! `K = c n / log n` with constant noisy labels.
//!
//! Three conditions are combined:
//!
//! * `A`: exact recovery is information-theoretically possible,
//!   `eta_1(c, 2b, b) > 1`.
//! * `B1`: BP without side information achieves weak recovery, `lambda > 1/e`.
//! * `B2`: BP with side information achieves weak recovery, `lambda > 1/(Lambda e)`.
//!
//! with `lambda = c^2 b`. Region ids:
//!
//! | id | condition |
//! |----|-----------|
//! | 1 | A and B1 |
//! | 2 | A, not B1, B2 |
//! | 3 | not A, B1 |
//! | 4 | not A, not B1, B2 |
//! | 5 | A, not B2 |
//! | 6 | not A, not B2 |

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::exponents::regime::{eta, Eta, RegimeParams};
use crate::model::channel::{make_channel, ChannelKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub b: f64,
    pub c: f64,
    pub region: u8,
}

/// Region id (1-6) of the point `(b, c)` with noisy labels of flip rate `alpha`.
pub fn phase_region(b: f64, c: f64, alpha: f64) -> Result<u8> {
    let lambda_side = make_channel(&ChannelKind::NoisyLabel(alpha))?.lambda_side();
    region_with_lambda_side(b, c, lambda_side)
}

fn region_with_lambda_side(b: f64, c: f64, lambda_side: f64) -> Result<u8> {
    if !(b > 0.0 && c > 0.0) {
        return Err(Error::param(format!(
            "b and c must be positive, got b={b}, c={c}"
        )));
    }
    let exact = eta(Eta::One, &RegimeParams::new(c, 2.0 * b, b)?, 0.0)? > 1.0;
    let lambda = c * c * b;
    let bp_plain = lambda > 1.0 / E;
    let bp_side = lambda > 1.0 / (lambda_side * E);
    Ok(match (exact, bp_plain, bp_side) {
        (true, true, _) => 1,
        (true, false, true) => 2,
        (false, true, _) => 3,
        (false, false, true) => 4,
        (true, false, false) => 5,
        (false, false, false) => 6,
    })
}

/// `count` evenly spaced values on `[lo, hi]`; a single value when `count <= 1`
/// or the range is degenerate.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 || lo == hi {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect()
}

/// Regions on a `resolution x resolution` grid, `b` varying slowest.
pub fn phase_grid(
    b_range: (f64, f64),
    c_range: (f64, f64),
    alpha: f64,
    resolution: usize,
) -> Result<Vec<PhasePoint>> {
    let lambda_side = make_channel(&ChannelKind::NoisyLabel(alpha))?.lambda_side();
    let mut out = Vec::new();
    for b in linspace(b_range.0, b_range.1, resolution) {
        for c in linspace(c_range.0, c_range.1, resolution) {
            out.push(PhasePoint {
                b,
                c,
                region: region_with_lambda_side(b, c, lambda_side)?,
            });
        }
    }
    Ok(out)
}
