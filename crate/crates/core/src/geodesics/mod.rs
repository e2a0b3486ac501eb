//! Normal rays `σ_ξ(t) = ξ + ε e^{−2t} η` as almost-geodesics, Gromov-product
//! experiments at the boundary and boundary-limit probes for isometries.

mod extension;
mod gromov;

pub use extension::{boundary_limit_probe, ExtensionReport, Isometry};
pub use gromov::{
    gromov_boundary_experiment, Classification, GromovExperiment, GromovSettings, SequenceSpec,
};

use rayon::prelude::*;

use crate::domain::{BoundaryPoint, ComplexHyperplane, ConvexDomain};
use crate::error::{Error, Result};
use crate::kobayashi::{DistanceEngine, PreparedPoint};
use crate::linalg;
use crate::model_domain::ParameterCertificate;
use crate::scalar::Scalar;

/// Largest `K` before the bracket data are declared inconsistent.
pub const K_MAX: f64 = 100.0;

/// `t ↦ ξ + ε e^{−2t} η` for a boundary point `ξ` with inward normal `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalRay<S> {
    pub base: BoundaryPoint<S>,
    pub eps: S,
}

impl<S: Scalar> NormalRay<S> {
    pub fn new(domain: &ConvexDomain<S>, xi: &[S], eps: S) -> Result<Self> {
        if !(eps > S::zero()) || !eps.is_finite() {
            return Err(Error::Argument(format!("ray scale ε = {eps} must be positive")));
        }
        Ok(Self { base: domain.boundary_point(xi)?, eps })
    }

    /// `ε e^{−2t}`, the distance from `σ(t)` to `ξ + T^ℂ_ξ(∂Ω)`.
    pub fn depth(&self, t: S) -> S {
        self.eps * (-(t + t)).exp()
    }

    pub fn point(&self, t: S) -> Vec<S> {
        linalg::axpy(&self.base.xi, self.depth(t), &self.base.normal)
    }

    pub fn tangent_hyperplane(&self) -> ComplexHyperplane<S> {
        ComplexHyperplane {
            point: self.base.xi.clone(),
            normal: self.base.normal.clone(),
            directions: self.base.tangents.clone(),
        }
    }
}

/// Half the normal depth the embedded model domain guarantees.
pub fn certified_eps<S: Scalar>(cert: &ParameterCertificate<S>) -> S {
    cert.tau * S::lit(0.5)
}

pub fn sigma_eval<S: Scalar>(domain: &ConvexDomain<S>, ray: &NormalRay<S>, t: S) -> Result<Vec<S>> {
    if !(t >= S::zero()) || !t.is_finite() {
        return Err(Error::Argument(format!("ray time {t} must be non-negative")));
    }
    let z = ray.point(t);
    if !domain.contains(&z) {
        return Err(Error::RayEscape { t: t.f64(), eps: ray.eps.f64() });
    }
    Ok(z)
}

/// Default time horizon of a ray.
pub const DEFAULT_HORIZON: f64 = 8.0;
/// Smallest ray depth, as a fraction of the bounding radius, that the default
/// horizon reaches; keeps the deepest grid point clear of the conditioning floor.
pub const DEPTH_FLOOR: f64 = 1e-8;

/// `min(8, ½log(ε/(10⁻⁸R)))`.
pub fn default_horizon<S: Scalar>(domain: &ConvexDomain<S>, ray: &NormalRay<S>) -> S {
    let floor = S::lit(DEPTH_FLOOR) * domain.bounding_radius();
    let reach = (ray.eps / floor).ln() * S::lit(0.5);
    reach.min(S::lit(DEFAULT_HORIZON)).max(S::zero())
}

/// `n` uniform times on `[0, T]`.
pub fn time_grid<S: Scalar>(horizon: S, n: usize) -> Result<Vec<S>> {
    if n < 2 || !(horizon > S::zero()) || !horizon.is_finite() {
        return Err(Error::Argument(format!("time grid needs n ≥ 2 and T > 0, got n = {n}, T = {horizon}")));
    }
    Ok((0..n).map(|k| horizon * S::of(k) / S::of(n - 1)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicRow<S> {
    pub s: S,
    pub t: S,
    pub lo: S,
    pub hi: S,
    /// `max(hi − |s−t|, |s−t| − lo, 0)`.
    pub defect: S,
    /// `½|log(dist(σ(s),H)/dist(σ(t),H))|` for the tangent hyperplane at `ξ`.
    pub tangent_lower: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlmostGeodesicReport<S> {
    pub rows: Vec<GeodesicRow<S>>,
    pub k_additive: S,
    pub k_lipschitz: S,
    pub k: S,
    /// Pair attaining `k`.
    pub worst_pair: (S, S),
    /// `max(|s−t| − lo)`; non-positive up to rounding when the lower
    /// inequality `k ≥ |s−t|` holds at bracket level.
    pub lower_shortfall: S,
    /// `max |tangent_lower − |s−t||`.
    pub tangent_error: S,
    /// Pairs whose brackets are wider than `log K` on either side (empty unless `K` was capped).
    pub violations: Vec<(S, S)>,
}

/// The least `K` such that `|s−t| − log K ≤ lo`, `hi ≤ |s−t| + log K` and
/// `hi ≤ K|s−t|` on every pair of the grid.
pub fn almost_geodesic_report<S: Scalar>(
    engine: &DistanceEngine<S>,
    ray: &NormalRay<S>,
    times: &[S],
) -> Result<AlmostGeodesicReport<S>> {
    if times.len() < 2 {
        return Err(Error::Argument("time grid needs at least two points".into()));
    }
    let domain = engine.domain();
    let points: Vec<Vec<S>> = times.iter().map(|&t| sigma_eval(domain, ray, t)).collect::<Result<_>>()?;
    let plane = ray.tangent_hyperplane();
    let pairs: Vec<(usize, usize)> =
        (0..times.len()).flat_map(|i| (i + 1..times.len()).map(move |j| (i, j))).collect();
    let prepared: Vec<PreparedPoint<S>> = points.par_iter().map(|z| engine.prepare(z)).collect::<Result<_>>()?;
    let extra = std::slice::from_ref(&plane);
    // every pair lies in the complex normal line, so one test decides
    let direct = engine.has_slice(&points[0], &points[1]);
    let chain: Vec<S> = if direct {
        Vec::new()
    } else {
        let steps: Vec<S> = (0..points.len() - 1)
            .into_par_iter()
            .map(|k| engine.bracket_prepared(&prepared[k], &prepared[k + 1], extra).map(|b| b.hi))
            .collect::<Result<_>>()?;
        std::iter::once(S::zero())
            .chain(steps.iter().scan(S::zero(), |acc, h| {
                *acc = *acc + *h;
                Some(*acc)
            }))
            .collect()
    };
    let rows: Vec<GeodesicRow<S>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (lo, hi) = if direct {
                let k = engine.bracket_prepared(&prepared[i], &prepared[j], extra)?;
                (k.lo, k.hi)
            } else {
                // triangle inequality along the consecutive grid points
                let (lo, _, _) = engine.lower_prepared(&prepared[i], &prepared[j], extra);
                (lo, (chain[j] - chain[i]).max(lo))
            };
            let d = (times[j] - times[i]).abs();
            let defect = (hi - d).max(d - lo).max(S::zero());
            let tangent_lower = (plane.distance(&points[i]) / plane.distance(&points[j])).ln().abs() * S::lit(0.5);
            Ok(GeodesicRow { s: times[i], t: times[j], lo, hi, defect, tangent_lower })
        })
        .collect::<Result<_>>()?;

    let k_max = S::lit(K_MAX);
    let mut k_additive = S::one();
    let mut k_lipschitz = S::one();
    let mut worst_pair = (times[0], times[0]);
    let mut k = S::one();
    let mut lower_shortfall = S::neg_infinity();
    let mut tangent_error = S::zero();
    let mut violations = Vec::new();
    for r in &rows {
        let d = r.t - r.s;
        if r.lo - d > k_max.ln() {
            return Err(Error::BracketInconsistency {
                s: r.s.f64(),
                t: r.t.f64(),
                required: (r.lo - d).exp().f64(),
                k_max: K_MAX,
            });
        }
        let add = r.defect.exp();
        let lip = if d > S::zero() { r.hi / d } else { S::one() };
        k_additive = k_additive.max(add);
        k_lipschitz = k_lipschitz.max(lip);
        if add.max(lip) > k {
            k = add.max(lip);
            worst_pair = (r.s, r.t);
        }
        if add.max(lip) > k_max {
            violations.push((r.s, r.t));
        }
        lower_shortfall = lower_shortfall.max(d - r.lo);
        tangent_error = tangent_error.max((r.tangent_lower - d).abs());
    }
    Ok(AlmostGeodesicReport {
        rows,
        k_additive,
        k_lipschitz,
        k,
        worst_pair,
        lower_shortfall,
        tangent_error,
        violations,
    })
}
