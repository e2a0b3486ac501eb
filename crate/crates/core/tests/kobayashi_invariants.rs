use koba_core::domain::ConvexDomain;
use koba_core::kobayashi::{
    exact_oracle, metric_bracket, two_tangent_profile, default_depths, DistanceEngine, DistanceOptions,
    OracleDomain,
};
use koba_core::linalg;
use koba_core::sampling;
use proptest::prelude::*;

fn in_ball(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    sampling::point_in_ball(rng, &vec![0.0; dim], r)
}

#[test]
fn oracle_lies_in_brackets() {
    for (tag, d) in [(OracleDomain::Disc, ConvexDomain::disc()), (OracleDomain::Ball, ConvexDomain::ball(2).unwrap())] {
        let e = DistanceEngine::new(d.clone(), DistanceOptions::default());
        let mut rng = sampling::rng(21);
        for _ in 0..200 {
            let p = in_ball(&mut rng, d.real_dim(), 0.98);
            let q = in_ball(&mut rng, d.real_dim(), 0.98);
            let k = e.distance_bracket(&p, &q).unwrap();
            let exact = exact_oracle(tag, &p, &q).unwrap();
            assert!(k.contains(exact), "{k:?} vs {exact}");
        }
    }
}

#[test]
fn nested_balls_decrease_upper_brackets() {
    let small = DistanceEngine::new(ConvexDomain::ball(2).unwrap(), DistanceOptions::default());
    let big = DistanceEngine::new(ConvexDomain::ball_with_radius(2, 2.0).unwrap(), DistanceOptions::default());
    let mut rng = sampling::rng(22);
    for _ in 0..100 {
        let p = in_ball(&mut rng, 4, 0.95);
        let q = in_ball(&mut rng, 4, 0.95);
        let hs = small.distance_bracket(&p, &q).unwrap().hi;
        let hb = big.distance_bracket(&p, &q).unwrap().hi;
        assert!(hb <= hs + 1e-3 * hs.max(1.0));
    }
}

#[test]
fn slice_upper_dominates_ambient_lower() {
    let e = DistanceEngine::new(ConvexDomain::ellipsoid(vec![2.0, 1.0, 0.5]).unwrap(), DistanceOptions::default());
    let mut rng = sampling::rng(23);
    let mut checked = 0;
    while checked < 100 {
        let p = in_ball(&mut rng, 6, 0.49);
        let q = in_ball(&mut rng, 6, 0.49);
        let k = e.distance_bracket(&p, &q).unwrap();
        assert!(k.hi >= k.lo);
        checked += 1;
    }
}

#[test]
fn polydisc_segment_brackets_contain_product_distance() {
    let e = DistanceEngine::new(ConvexDomain::polydisc(2).unwrap(), DistanceOptions::default());
    let mut rng = sampling::rng(24);
    for _ in 0..10 {
        let p = [in_ball(&mut rng, 2, 0.8), in_ball(&mut rng, 2, 0.8)].concat();
        let q = [in_ball(&mut rng, 2, 0.8), in_ball(&mut rng, 2, 0.8)].concat();
        let k = e.distance_bracket(&p, &q).unwrap();
        let a = exact_oracle(OracleDomain::Disc, &p[..2], &q[..2]).unwrap();
        let b = exact_oracle(OracleDomain::Disc, &p[2..], &q[2..]).unwrap();
        assert!(k.contains(a.max(b)), "{k:?} vs {}", a.max(b));
    }
}

#[test]
fn two_tangent_constant_is_stable() {
    let b2 = ConvexDomain::ball(2).unwrap();
    let depths = default_depths::<f64>(8);
    let rep =
        two_tangent_profile(&b2, &[1.0, 0.0, 0.0, 0.0], &[-1.0, 0.0, 0.0, 0.0], &depths, DistanceOptions::default())
            .unwrap();
    assert!(rep.c_fit.is_finite());
    // the shortfall settles as δ → 0
    let tail: Vec<f64> = rep.rows.iter().rev().take(3).map(|r| r.1).collect();
    assert!(tail.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-3), "{rep:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graham_sandwich_holds(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let d = ConvexDomain::ellipsoid(vec![2.0, 1.0]).unwrap();
        let mut rng = sampling::rng(seed);
        let p = in_ball(&mut rng, 4, 0.9);
        let v = linalg::scale(&sampling::unit_vector(&mut rng, 4), scale);
        let tol = 1e-3;
        let m = metric_bracket(&d, &p, &v, tol).unwrap();
        prop_assert!(m.hi / m.lo <= 2.0 * m.radius.hi / m.radius.lo * (1.0 + 1e-12));
        prop_assert!(m.radius.hi / m.radius.lo <= 1.0 + tol + 1e-12);
    }

    #[test]
    fn ball_metric_in_bracket(seed in any::<u64>()) {
        let d = ConvexDomain::ball(2).unwrap();
        let mut rng = sampling::rng(seed);
        let p = in_ball(&mut rng, 4, 0.95);
        let v = sampling::unit_vector(&mut rng, 4);
        let m = metric_bracket(&d, &p, &v, 1e-6).unwrap();
        let exact = koba_core::kobayashi::ball_metric(&p, &v);
        prop_assert!(m.lo <= exact && exact <= m.hi);
    }

    #[test]
    fn brackets_are_symmetric(seed in any::<u64>()) {
        let e = DistanceEngine::new(ConvexDomain::ellipsoid(vec![1.5, 1.0]).unwrap(), DistanceOptions::default());
        let mut rng = sampling::rng(seed);
        let p = in_ball(&mut rng, 4, 0.9);
        let q = in_ball(&mut rng, 4, 0.9);
        prop_assert_eq!(e.distance_bracket(&p, &q).unwrap(), e.distance_bracket(&q, &p).unwrap());
    }
}
