//! Certified two-sided brackets for the Kobayashi metric and distance.

mod distance;
mod oracle;

pub use distance::{
    default_depths, distance_bracket, escape_constant, gromov_product, two_tangent_profile, DistanceBracket,
    DistanceEngine, DistanceOptions, EscapeReport, GromovBracket, LowerMethod, PreparedPoint, TwoTangentReport,
    UpperMethod,
};
pub use oracle::{
    ball_automorphism, ball_distance, ball_metric, disc_automorphism, exact_oracle, OracleDomain,
};
pub(crate) use oracle::quadric_distance;

use rayon::prelude::*;

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

const INITIAL_DIRECTIONS: usize = 64;
const MAX_DIRECTIONS: usize = 1 << 16;

/// Bracket for `r_Ω(p, v)`, the supremum of radii of affine discs
/// `p + λ·r·v/‖v‖` (`|λ| < 1`) inside Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusBracket<S> {
    pub lo: S,
    pub hi: S,
    pub directions: usize,
}

/// Graham's bracket `‖v‖/(2r) ≤ κ_Ω(p, v) ≤ ‖v‖/r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricBracket<S> {
    pub lo: S,
    pub hi: S,
    pub radius: RadiusBracket<S>,
}

/// The slice `Ω ∩ (p + ℂv)` is convex, so `r_Ω(p, v)` is the least exit
/// distance over the directions `cos φ·v̂ + sin φ·𝔍v̂`. Sampling `N` directions
/// gives an upper bound (a boundary point at that distance) and a lower
/// bound (the inradius about `p` of the polygon spanned by the exit points,
/// which lies in the slice by convexity). `N` starts at 64 and doubles until
/// `hi − lo ≤ tol·hi`.
pub fn inscribed_disc_radius<S: Scalar>(
    domain: &ConvexDomain<S>,
    p: &[S],
    v: &[S],
    tol: S,
) -> Result<RadiusBracket<S>> {
    domain.require_interior(p)?;
    domain.check_dim(v)?;
    let u = linalg::normalize(v).ok_or_else(|| Error::Argument("direction must be non-zero".into()))?;
    let ju = linalg::mul_i(&u);
    let mut n = INITIAL_DIRECTIONS;
    loop {
        let (lo, hi) = polygon_radius(domain, p, &u, &ju, n);
        if hi - lo <= tol * hi || n >= MAX_DIRECTIONS {
            if hi - lo > tol * hi {
                return Err(Error::ToleranceNotMet { what: "inscribed disc radius".into(), lo: lo.f64(), hi: hi.f64() });
            }
            return Ok(RadiusBracket { lo, hi, directions: n });
        }
        n *= 2;
    }
}

/// Exit-polygon bracket on the radius of the disc about `p` in the complex
/// line spanned by the unit vector `u` (`ju = 𝔍u`), from `n` directions.
pub(crate) fn polygon_radius<S: Scalar>(domain: &ConvexDomain<S>, p: &[S], u: &[S], ju: &[S], n: usize) -> (S, S) {
    let hits: Vec<(S, S, S)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let phi = S::TAU() * S::of(k) / S::of(n);
            let (s, c) = phi.sin_cos();
            let dir: Vec<S> = u.iter().zip(ju).map(|(a, b)| c * *a + s * *b).collect();
            let hit = domain.ray_exit(p, &dir);
            (hit.hi, hit.lo * c, hit.lo * s)
        })
        .collect();
    let hi = hits.iter().map(|h| h.0).fold(S::infinity(), S::min);
    let mut lo = S::infinity();
    for k in 0..n {
        let (_, x0, y0) = hits[k];
        let (_, x1, y1) = hits[(k + 1) % n];
        let edge = (x1 - x0).hypot(y1 - y0);
        let d = if edge > S::zero() { (x0 * y1 - x1 * y0).abs() / edge } else { x0.hypot(y0) };
        lo = lo.min(d);
    }
    (lo.min(hi), hi)
}

pub fn metric_bracket<S: Scalar>(domain: &ConvexDomain<S>, p: &[S], v: &[S], tol: S) -> Result<MetricBracket<S>> {
    let radius = inscribed_disc_radius(domain, p, v, tol)?;
    let nv = linalg::norm(v);
    Ok(MetricBracket { lo: nv / (radius.hi + radius.hi), hi: nv / radius.lo, radius })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_examples() {
        let disc = ConvexDomain::<f64>::disc();
        let r = inscribed_disc_radius(&disc, &[0.0, 0.0], &[1.0, 0.0], 1e-6).unwrap();
        assert!(r.lo <= 1.0 && 1.0 <= r.hi && r.hi - r.lo <= 1e-6 * r.hi);
        let r = inscribed_disc_radius(&disc, &[0.5, 0.0], &[1.0, 0.0], 1e-6).unwrap();
        assert!(r.lo <= 0.5 && 0.5 <= r.hi);
        let b2 = ConvexDomain::<f64>::ball(2).unwrap();
        let r = inscribed_disc_radius(&b2, &[0.5, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0], 1e-6).unwrap();
        // 0.25 + r² = 1
        let want = 0.75f64.sqrt();
        assert!(r.lo <= want && want <= r.hi && r.hi - r.lo < 1e-6);
    }

    #[test]
    fn radius_errors() {
        let disc = ConvexDomain::<f64>::disc();
        assert!(matches!(inscribed_disc_radius(&disc, &[1.2, 0.0], &[1.0, 0.0], 1e-3), Err(Error::Domain(_))));
        assert!(matches!(inscribed_disc_radius(&disc, &[0.0, 0.0], &[0.0, 0.0], 1e-3), Err(Error::Argument(_))));
    }

    #[test]
    fn metric_examples() {
        let disc = ConvexDomain::<f64>::disc();
        let m = metric_bracket(&disc, &[0.0, 0.0], &[1.0, 0.0], 1e-8).unwrap();
        assert!((m.lo - 0.5).abs() < 1e-7 && (m.hi - 1.0).abs() < 1e-7);
        let m = metric_bracket(&disc, &[0.5, 0.0], &[1.0, 0.0], 1e-8).unwrap();
        assert!((m.lo - 1.0).abs() < 1e-7 && (m.hi - 2.0).abs() < 1e-7);
        assert!(m.lo <= 4.0 / 3.0 && 4.0 / 3.0 <= m.hi);
        let m2 = metric_bracket(&disc, &[0.5, 0.0], &[2.0, 0.0], 1e-8).unwrap();
        assert!((m2.lo - 2.0 * m.lo).abs() < 1e-14 && (m2.hi - 2.0 * m.hi).abs() < 1e-14);
    }

    #[test]
    fn graham_sandwich() {
        let d = ConvexDomain::<f64>::ellipsoid(vec![2.0, 1.0]).unwrap();
        let tol = 1e-4;
        let m = metric_bracket(&d, &[0.4, 0.3, -0.2, 0.1], &[0.3, -0.5, 0.2, 0.9], tol).unwrap();
        assert!(m.hi / m.lo <= 2.0 * m.radius.hi / m.radius.lo * (1.0 + 1e-15));
        assert!(m.hi / m.lo <= 2.0 * (1.0 + tol) * (1.0 + 1e-12));
    }
}
