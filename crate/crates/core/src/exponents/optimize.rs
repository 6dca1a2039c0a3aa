//! One-dimensional maximisation of concave objectives.

/// Location and value of a maximum found on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub t: f64,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a concave `f` on `[lo, hi]`.
///
/// Both endpoints are compared against the interior optimum, so maxima on the
/// boundary and jumps at the boundary (zero-likelihood symbols) are handled.
/// When the objective looks flat, a 1001-point grid is scanned and the best
/// grid cell refined, which guards against plateaus that golden section
/// cannot see into. `+inf` values win; NaN is treated as `-inf`.
pub fn maximize_concave(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Maximum {
    search(&f, lo, hi, tol, max_iter)
}

fn search(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Maximum {
    let g = |t: f64| {
        let v = f(t);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1);
        }
        iterations += 1;
    }
    let converged = b - a <= tol;
    let mid = 0.5 * (a + b);
    let mut best = Maximum {
        t: mid,
        value: g(mid),
        converged,
        iterations,
    };
    for (t, v) in [(x1, f1), (x2, f2), (lo, g(lo)), (hi, g(hi))] {
        if v > best.value {
            best.t = t;
            best.value = v;
        }
    }

    let (flo, fhi) = (g(lo), g(hi));
    let flat = flo == fhi && (best.value - flo).abs() <= 1e-15 * (1.0 + flo.abs());
    if flat {
        const GRID: usize = 1000;
        let step = (hi - lo) / GRID as f64;
        let mut idx = 0;
        let mut top = f64::NEG_INFINITY;
        for i in 0..=GRID {
            let v = g(lo + step * i as f64);
            if v > top {
                top = v;
                idx = i;
            }
        }
        if top > best.value {
            let l = lo + step * idx.saturating_sub(1) as f64;
            let h = (lo + step * (idx + 1) as f64).min(hi);
            let refined = search(f, l, h, tol, max_iter);
            best = Maximum {
                iterations: best.iterations + refined.iterations,
                ..refined
            };
        }
    }
    best
}
