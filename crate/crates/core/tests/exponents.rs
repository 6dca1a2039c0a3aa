use approx::assert_relative_eq;
use hiddencomm_core::exponents::regime::{noisy_label_trends, partial_reveal_trends};
use hiddencomm_core::exponents::{
    chernoff_exponent, eta, exact_recovery_check, phase_grid, phase_region, psi, psi_curve,
    regime_threshold, weak_recovery_check, Eta, ExponentQuery, RegimeParams, Side,
};
use hiddencomm_core::model::make_channel;
use hiddencomm_core::{ChannelKind, SideChannel};
use proptest::prelude::*;

fn noisy(alpha: f64) -> SideChannel {
    make_channel(&ChannelKind::NoisyLabel(alpha)).unwrap()
}

fn query(
    theta: f64,
    m1: f64,
    m2: f64,
    p: f64,
    q: f64,
    ch: &SideChannel,
    side: Side,
) -> ExponentQuery<'_> {
    ExponentQuery {
        theta,
        m1,
        m2,
        p,
        q,
        channel: ch,
        side,
    }
}

fn exponent(q: &ExponentQuery) -> f64 {
    chernoff_exponent(q).unwrap().value
}

/// Brute-force `sup_t (t theta - psi(t))` over `points` evenly spaced `t`.
fn grid_scan(q: &ExponentQuery, points: usize) -> f64 {
    let (lo, hi) = q.side.interval();
    (0..points)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            t * q.theta - psi(q, t)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Golden-section maximiser kept separate from the library's own.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..300 {
        let a = hi - r * (hi - lo);
        let b = lo + r * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    f(0.5 * (lo + hi)).max(f(lo)).max(f(hi))
}

#[test]
fn psi_known_values() {
    let none = SideChannel::empty();
    let q = query(0.0, 1.0, 0.0, 0.5, 0.25, &none, Side::QU);
    assert_relative_eq!(psi(&q, 0.5), -0.034668, epsilon = 1e-6);
    assert_relative_eq!(
        psi(&q, 0.5),
        (0.25 * 2f64.sqrt() + 0.75 * (2.0f64 / 3.0).sqrt()).ln(),
        max_relative = 1e-13
    );
    // E_Q[e^{L_G}] = 1
    assert!(psi(&q, 1.0).abs() < 1e-15);
    let ch = noisy(0.2);
    let pv = query(0.0, 3.0, 2.0, 0.4, 0.1, &ch, Side::PV);
    assert!(psi(&pv, -1.0).abs() < 1e-14);
}

#[test]
fn exponent_interval_endpoints_and_shift() {
    for (p, q, m1, m2, alpha) in [
        (0.5, 0.25, 10.0, 0.0, 0.1),
        (5e-3, 5e-4, 99.0, 1.0, 0.1),
        (0.04, 5e-4, 100.0, 3.0, 0.01),
        (0.3, 0.2, 4.0, 7.0, 0.35),
    ] {
        let ch = noisy(alpha);
        let qu = query(0.0, m1, m2, p, q, &ch, Side::QU);
        let (lo, hi) = qu.theta_interval();
        assert!(lo < 0.0 && hi > 0.0);
        assert!(exponent(&query(lo, m1, m2, p, q, &ch, Side::QU)).abs() < 1e-8);
        assert!(exponent(&query(hi, m1, m2, p, q, &ch, Side::PV)).abs() < 1e-8);
        let mut prev_qu = f64::NEG_INFINITY;
        let mut prev_pv = f64::INFINITY;
        let mut prev_theta = lo;
        for i in 0..100 {
            let theta = lo + (hi - lo) * i as f64 / 99.0;
            let e_qu = exponent(&query(theta, m1, m2, p, q, &ch, Side::QU));
            let e_pv = exponent(&query(theta, m1, m2, p, q, &ch, Side::PV));
            assert!(
                (e_pv - (e_qu - theta)).abs() < 1e-8,
                "shift identity at theta={theta}: {e_pv} vs {}",
                e_qu - theta
            );
            assert!(e_qu >= -1e-12 && e_pv >= -1e-12);
            assert!(e_qu >= prev_qu - 1e-10);
            assert!(e_pv <= prev_pv + 1e-10);
            if i > 0 {
                assert!(e_qu - prev_qu <= theta - prev_theta + 1e-10);
            }
            prev_qu = e_qu;
            prev_pv = e_pv;
            prev_theta = theta;
        }
    }
}

#[test]
fn exponent_matches_dense_scan_example() {
    let none = SideChannel::empty();
    let q = query(0.5, 10.0, 0.0, 0.5, 0.25, &none, Side::QU);
    assert!((exponent(&q) - grid_scan(&q, 1_000_001)).abs() < 1e-8);
}

#[test]
fn exponent_never_decreases_with_more_features() {
    let mut prev = f64::NEG_INFINITY;
    for m in 0..=20 {
        let kind = if m == 0 {
            ChannelKind::Empty
        } else {
            ChannelKind::Replicated(Box::new(ChannelKind::NoisyLabel(0.3)), m)
        };
        let ch = make_channel(&kind).unwrap();
        let r = exact_recovery_check(1e4, 100.0, 5e-3, 5e-4, &ch).unwrap();
        assert!(r.exponent >= prev - 1e-12, "M={m}");
        prev = r.exponent;
    }
}

#[test]
fn recovery_checks_on_sparse_example() {
    let none = SideChannel::empty();
    let w = weak_recovery_check(1e4, 100.0, 5e-3, 5e-4, &none, 10.0).unwrap();
    let d_pq = 0.005 * 10f64.ln() + 0.995 * (0.995f64 / 0.9995).ln();
    assert_relative_eq!(w.lhs2, 99.0 * d_pq, max_relative = 1e-12);
    assert!(w.lhs2 < 2.0 * 100f64.ln());
    assert!(!w.feasible);
    let side = make_channel(&ChannelKind::Replicated(
        Box::new(ChannelKind::NoisyLabel(0.1)),
        10,
    ))
    .unwrap();
    let ws = weak_recovery_check(1e4, 100.0, 5e-3, 5e-4, &side, 10.0).unwrap();
    assert_relative_eq!(ws.lhs2 - w.lhs2, 35.156, epsilon = 1e-3);
    assert!(ws.feasible);

    let flat = exact_recovery_check(1e4, 100.0, 0.01, 0.01, &none).unwrap();
    // with psi = 0 the supremum sits at t = 1
    assert_relative_eq!(flat.exponent, 100f64.ln(), max_relative = 1e-9);
    assert!(!flat.feasible);
}

#[test]
fn eta_one_matches_numeric_supremum() {
    let mut count = 0;
    for &rho in &[0.2, 0.5, 0.8, 1.0, 1.5] {
        for &b in &[0.3, 1.0, 4.0] {
            for &gap in &[0.1, 1.0, 5.0] {
                let a = b + gap;
                let params = RegimeParams::new(rho, a, b).unwrap();
                let closed = eta(Eta::One, &params, 0.0).unwrap();
                let numeric = golden_max(
                    |t| t * rho * (a - b) + rho * b - rho * b * (a / b).powf(t),
                    0.0,
                    1.0,
                );
                assert!(
                    (closed - numeric).abs() < 1e-9,
                    "rho={rho} a={a} b={b}: {closed} vs {numeric}"
                );
                count += 1;
            }
        }
    }
    assert!(count >= 45);
    assert_relative_eq!(
        eta(Eta::One, &RegimeParams::new(1.0, 2.0, 1.0).unwrap(), 0.0).unwrap(),
        1.0 - (1.0 + 2f64.ln().ln()) / 2f64.ln(),
        max_relative = 1e-14
    );
}

#[test]
fn eta_two_and_three_relations() {
    for &(rho, a, b) in &[
        (1.0, 2.0, 1.0),
        (0.5, 10.0, 1.0),
        (0.8, 6.0, 2.0),
        (1.0, 30.0, 0.5),
    ] {
        let params = RegimeParams::new(rho, a, b).unwrap();
        let bound = params.beta_bound();
        assert!(bound > 0.0);
        assert!((eta(Eta::Two, &params, bound).unwrap() - bound).abs() < 1e-9);
        for i in 1..50 {
            let beta = bound * i as f64 / 50.0;
            let e2 = eta(Eta::Two, &params, beta).unwrap();
            let e3 = eta(Eta::Three, &params, beta).unwrap();
            assert!(e3 >= e2 - 1e-12, "beta={beta}: eta3={e3} < eta2={e2}");
        }
        assert!(eta(Eta::Two, &params, 1.01 * bound).is_err());
    }
}

#[test]
fn regime_cases_for_standard_channels() {
    let params = RegimeParams::new(1.0, 2.0, 1.0).unwrap();
    let eta1 = eta(Eta::One, &params, 0.0).unwrap();
    let r = regime_threshold(&params, &noisy_label_trends(0.0)).unwrap();
    assert_eq!(r.case_id, 1);
    assert_relative_eq!(r.condition_value, eta1, max_relative = 1e-14);
    let r = regime_threshold(&params, &partial_reveal_trends(0.7)).unwrap();
    assert_eq!(r.case_id, 2);
    assert_relative_eq!(r.condition_value, eta1 + 0.7, max_relative = 1e-14);
}

#[test]
fn psi_curve_behaviour() {
    let plain = eta(Eta::One, &RegimeParams::new(1.0, 2.0, 1.0).unwrap(), 0.0).unwrap();
    let mut prev = f64::INFINITY;
    for i in 1..=100 {
        let alpha = 0.4999 * i as f64 / 100.0;
        let v = psi_curve(alpha, 1.0, 2.0, 1.0).unwrap();
        assert!(v <= prev + 1e-12, "alpha={alpha}");
        assert!(v >= plain - 1e-12);
        prev = v;
    }
    assert!((psi_curve(0.4999999, 1.0, 2.0, 1.0).unwrap() - plain).abs() < 1e-9);
}

#[test]
fn phase_reference_points_and_alpha_order() {
    assert_eq!(phase_region(1.0, 1.0, 0.3).unwrap(), 3);
    assert_eq!(phase_region(15.0, 1.0, 0.3).unwrap(), 1);
    assert_eq!(phase_region(1.2, 0.5, 0.3).unwrap(), 4);
    let coarse = phase_grid((0.1, 20.0), (0.05, 2.0), 0.3, 40).unwrap();
    let fine = phase_grid((0.1, 20.0), (0.05, 2.0), 0.1, 40).unwrap();
    assert_eq!(coarse.len(), 1600);
    let bp_ok = |r: u8| matches!(r, 1 | 2 | 4);
    for (c, f) in coarse.iter().zip(&fine) {
        assert_eq!((c.b, c.c), (f.b, f.c));
        assert!((1..=6).contains(&c.region));
        if bp_ok(c.region) {
            assert!(bp_ok(f.region), "({}, {}) lost BP feasibility", c.b, c.c);
        }
    }
    let side_needed = |g: &[hiddencomm_core::exponents::PhasePoint]| {
        g.iter().filter(|p| matches!(p.region, 2 | 4)).count()
    };
    assert!(side_needed(&fine) >= side_needed(&coarse));
}

fn channel_strategy() -> impl Strategy<Value = SideChannel> {
    (2usize..=4, 1usize..=3).prop_flat_map(|(alphabet, m)| {
        proptest::collection::vec(
            (
                proptest::collection::vec(0.05f64..1.0, alphabet),
                proptest::collection::vec(0.05f64..1.0, alphabet),
            ),
            m,
        )
        .prop_map(|rows| {
            let norm = |v: Vec<f64>| {
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect::<Vec<_>>()
            };
            let (plus, minus): (Vec<_>, Vec<_>) =
                rows.into_iter().map(|(a, b)| (norm(a), norm(b))).unzip();
            make_channel(&ChannelKind::Custom { plus, minus }).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn exponent_agrees_with_dense_scan(
        q in 0.01f64..0.5,
        ratio in 1.05f64..8.0,
        m1 in 0.0f64..40.0,
        m2 in 0.0f64..5.0,
        pos in 0.0f64..1.0,
        pv in any::<bool>(),
        ch in channel_strategy(),
    ) {
        let p = (q * ratio).min(0.95);
        let side = if pv { Side::PV } else { Side::QU };
        let base = query(0.0, m1, m2, p, q, &ch, side);
        let (lo, hi) = base.theta_interval();
        let qy = ExponentQuery { theta: lo + pos * (hi - lo), ..base };
        let solved = chernoff_exponent(&qy).unwrap();
        let scan = grid_scan(&qy, 1_000_001);
        prop_assert!((solved.value - scan).abs() < 1e-8, "{} vs {}", solved.value, scan);
        let (tl, th) = side.interval();
        prop_assert!(solved.t_star >= tl && solved.t_star <= th);
    }

    #[test]
    fn psi_is_convex_and_vanishes_at_zero(
        q in 0.01f64..0.5,
        ratio in 1.0f64..8.0,
        m1 in 0.0f64..40.0,
        m2 in 0.0f64..5.0,
        ch in channel_strategy(),
    ) {
        let p = (q * ratio).min(0.95);
        for side in [Side::QU, Side::PV] {
            let qy = query(0.0, m1, m2, p, q, &ch, side);
            prop_assert_eq!(psi(&qy, 0.0), 0.0);
            let (lo, hi) = side.interval();
            let ts: Vec<f64> = (0..=40).map(|i| lo + (hi - lo) * i as f64 / 40.0).collect();
            for w in ts.windows(3) {
                let mid = 0.5 * (psi(&qy, w[0]) + psi(&qy, w[2]));
                prop_assert!(psi(&qy, w[1]) <= mid + 1e-10);
            }
        }
    }
}
