use koba_core::domain::ConvexDomain;
use koba_core::model_domain::{select_parameters, verify_embedding, ModelDomain};
use koba_core::modulus::Modulus;
use koba_core::sampling;
use rand::Rng;

fn models() -> Vec<ModelDomain<f64>> {
    vec![
        ModelDomain::new(Modulus::linear(1.0).unwrap(), 1.0, 0.5).unwrap(),
        ModelDomain::new(Modulus::hoelder(0.5, 1.0).unwrap(), 3.0, 0.4).unwrap(),
        ModelDomain::new(Modulus::log_family(1.0).unwrap(), 8.0, 0.2).unwrap(),
    ]
}

#[test]
fn membership_is_monotone_in_s_and_t_is_bounded() {
    for (k, m) in models().into_iter().enumerate() {
        let tau = m.tau();
        let mut rng = sampling::rng(40 + k as u64);
        let mut members = 0;
        while members < 10_000 {
            let s = rng.random_range(0.0..tau);
            let t = rng.random_range(-tau..tau);
            if !m.contains(s, t) {
                continue;
            }
            members += 1;
            let s2 = s + (tau - s) * rng.random_range(0.0..1.0);
            assert!(s2 >= tau || m.contains(s2, t));
            let bound = m.h().inverse(s / m.alpha()).unwrap_or(f64::INFINITY);
            assert!(t.abs() <= bound + 1e-12, "t={t} s={s}");
        }
    }
}

#[test]
fn arc_length_is_odd_increasing_and_expanding() {
    for m in models() {
        let tau = m.tau();
        let mut prev = f64::NEG_INFINITY;
        for k in -199..200 {
            let y = 0.999 * tau * k as f64 / 200.0;
            let (_, g) = m.boundary_geometry(y).unwrap();
            let (_, gm) = m.boundary_geometry(-y).unwrap();
            assert_eq!(g, -gm);
            assert!(g > prev);
            assert!(g.abs() >= y.abs());
            prev = g;
        }
    }
}

#[test]
fn certified_embeddings_on_smooth_gallery() {
    let cases = [
        (ConvexDomain::disc(), Modulus::linear(1.0).unwrap()),
        (ConvexDomain::ball(2).unwrap(), Modulus::linear(1.0).unwrap()),
        (ConvexDomain::ellipsoid(vec![2.0, 1.0]).unwrap(), Modulus::linear(1.0).unwrap()),
    ];
    for (d, omega) in cases {
        let cert = select_parameters(&d, &omega, d.neighborhood(), 32, 5).unwrap();
        let model = ModelDomain::from_certificate(omega, &cert).unwrap();
        for bp in d.boundary_samples(4).unwrap() {
            let rep = verify_embedding(&d, &bp, &model, &cert, (16, 17)).unwrap();
            assert!(rep.satisfies_contract(), "{}: {rep:?}", d.tag());
        }
    }
}
