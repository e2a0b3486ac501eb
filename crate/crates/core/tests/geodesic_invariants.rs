use koba_core::domain::ConvexDomain;
use koba_core::geodesics::{
    almost_geodesic_report, certified_eps, default_horizon, gromov_boundary_experiment, time_grid, NormalRay,
    SequenceSpec,
};
use koba_core::kobayashi::{DistanceEngine, DistanceOptions};
use koba_core::model_domain::select_parameters;
use koba_core::modulus::Modulus;

fn certified_rays() -> Vec<(ConvexDomain<f64>, NormalRay<f64>)> {
    let cases = [
        (ConvexDomain::disc(), Modulus::linear(1.0).unwrap(), None),
        (ConvexDomain::ball(2).unwrap(), Modulus::linear(1.0).unwrap(), None),
        (ConvexDomain::ellipsoid(vec![2.0, 1.0]).unwrap(), Modulus::linear(1.0).unwrap(), Some(vec![2.0, 0.0, 0.0, 0.0])),
        (ConvexDomain::graph(Modulus::log_family(1.0).unwrap(), 2).unwrap(), Modulus::log_family(1.0).unwrap(), None),
    ];
    cases
        .into_iter()
        .map(|(d, omega, xi)| {
            let cert = select_parameters(&d, &omega, d.neighborhood(), 32, 9).unwrap();
            let xi = xi.or_else(|| d.marked_point()).unwrap_or_else(|| {
                let mut v = vec![0.0; d.real_dim()];
                v[0] = 1.0;
                v
            });
            let ray = NormalRay::new(&d, &xi, certified_eps(&cert)).unwrap();
            (d, ray)
        })
        .collect()
}

#[test]
fn certified_rays_are_almost_geodesics() {
    for (d, ray) in certified_rays() {
        let times = time_grid(default_horizon(&d, &ray), 17).unwrap();
        for &t in &times {
            let z = ray.point(t);
            assert!(d.contains(&z));
            let e = DistanceEngine::new(d.clone(), DistanceOptions::default());
            assert!(e.boundary_gap(&z) <= ray.depth(t) * (1.0 + 1e-9) + 1e-11 * d.bounding_radius(), "{} t={t}", d.tag());
        }
        let e = DistanceEngine::new(d.clone(), DistanceOptions::default());
        let rep = almost_geodesic_report(&e, &ray, &times).unwrap();
        assert!(rep.lower_shortfall <= 1e-6, "{}: {}", d.tag(), rep.lower_shortfall);
        assert!(rep.k <= 10.0, "{}: K = {}", d.tag(), rep.k);
    }
}

#[test]
fn classification_survives_base_point_change() {
    let e = DistanceEngine::new(ConvexDomain::ball(2).unwrap(), DistanceOptions::default());
    let spec = SequenceSpec::NormalRay { depth: 10, scale: 1.0 };
    let o = [0.0; 4];
    for xi2 in [[1.0, 0.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0]] {
        let x = gromov_boundary_experiment(&e, &[1.0, 0.0, 0.0, 0.0], &xi2, &spec, &spec, &o, &Default::default())
            .unwrap();
        assert_eq!(x.classification, x.second_classification);
        assert!(x.base_consistent);
    }
}
