//! Deterministic top-k selection.

use std::cmp::Ordering;

/// Larger value first, lower id first among equal values. Infinities sort at
/// the ends; NaN is placed after everything.
fn rank(values: &[f64], a: usize, b: usize) -> Ordering {
    let (x, y) = (values[a], values[b]);
    let key = |v: f64| if v.is_nan() { f64::NEG_INFINITY } else { v };
    match key(y).partial_cmp(&key(x)).unwrap() {
        Ordering::Equal => match (x.is_nan(), y.is_nan()) {
            (false, true) => Ordering::Less,
            (true, false) => Ordering::Greater,
            _ => a.cmp(&b),
        },
        other => other,
    }
}

/// Ids of the `k` largest values, returned in increasing id order. Ties are
/// broken in favour of the lower id. `k` larger than `values.len()` selects
/// everything.
pub fn topk(values: &[f64], k: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..values.len()).collect();
    let k = k.min(ids.len());
    if k == 0 {
        return Vec::new();
    }
    if k < ids.len() {
        ids.select_nth_unstable_by(k - 1, |&a, &b| rank(values, a, b));
        ids.truncate(k);
    }
    ids.sort_unstable();
    ids
}
