//! Bounded convex domains in ℂⁿ and their boundary geometry.
//!
//! Points of ℂⁿ are stored as real vectors `(x₁, y₁, …, xₙ, yₙ)` with
//! `z_j = x_j + i·y_j`, so multiplication by `i` is [`linalg::multiply_by_i`].

mod gallery;
mod probe;
mod projection;

pub use gallery::{Profile, Shape};
pub use probe::CStrictProbe;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Gradients below this norm make normals meaningless.
pub const GRADIENT_FLOOR: f64 = 1e-8;

/// Fraction of the bounding radius kept clear of the non-smooth seam of
/// capped domains.
pub const SEAM_CLEARANCE: f64 = 0.05;

/// A bounded convex domain `{ρ < 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain<S> {
    shape: Shape<S>,
    scale: S,
    neighborhood: S,
}

/// A point `ξ ∈ ∂Ω` with its inward unit normal and an orthonormal basis of
/// the complex tangent space `T^ℂ_ξ(∂Ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint<S> {
    pub xi: Vec<S>,
    pub normal: Vec<S>,
    /// `n − 1` complex directions; the real span of `{u, 𝔍u}` is `T^ℂ_ξ`.
    pub tangents: Vec<Vec<S>>,
    pub gradient_norm: S,
    /// Angle in radians between the outward normal and the projection
    /// direction that produced `ξ` (zero for points built directly).
    pub alignment: S,
}

/// The affine complex hyperplane `ξ + T^ℂ_ξ(∂Ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexHyperplane<S> {
    pub point: Vec<S>,
    pub normal: Vec<S>,
    pub directions: Vec<Vec<S>>,
}

impl<S: Scalar> ComplexHyperplane<S> {
    /// Euclidean distance from `p`, i.e. `|⟨p − ξ, η⟩_ℂ|`.
    pub fn distance(&self, p: &[S]) -> S {
        linalg::hermitian(&linalg::sub(p, &self.point), &self.normal).norm()
    }

    /// `ξ + Σ c_k u_k` for complex coefficients `c_k`.
    pub fn point_at(&self, coeffs: &[Complex<S>]) -> Vec<S> {
        let mut p = self.point.clone();
        for (c, u) in coeffs.iter().zip(&self.directions) {
            p = linalg::add(&p, &linalg::complex_scale(u, c.re, c.im));
        }
        p
    }

    /// Orthonormal real basis of the (2n−2)-dimensional real span.
    pub fn real_basis(&self) -> Vec<Vec<S>> {
        self.directions.iter().flat_map(|u| [u.clone(), linalg::mul_i(u)]).collect()
    }
}

/// Open disc `{ζ : |ζ − center| < radius}` in a complex line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc<S> {
    pub center: Complex<S>,
    pub radius: S,
}

/// Distance from the starting point to the boundary along a ray, bracketed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> RayHit<S> {
    pub fn mid(&self) -> S {
        (self.lo + self.hi) * S::lit(0.5)
    }
}

impl<S: Scalar> ConvexDomain<S> {
    pub(crate) fn from_shape(shape: Shape<S>) -> Self {
        let neighborhood = shape.default_neighborhood();
        Self { shape, scale: S::one(), neighborhood }
    }

    pub fn shape(&self) -> &Shape<S> {
        &self.shape
    }

    /// Same domain with the defining function multiplied by `k > 0`.
    pub fn scaled(mut self, k: S) -> Result<Self> {
        if !(k > S::zero()) || !k.is_finite() {
            return Err(Error::Argument(format!("defining-function scale {k} must be positive")));
        }
        self.scale = self.scale * k;
        Ok(self)
    }

    /// Radius `r` of the neighbourhood of `∂Ω` on which `ρ` is trusted.
    pub fn neighborhood(&self) -> S {
        self.neighborhood
    }

    pub fn with_neighborhood(mut self, r: S) -> Result<Self> {
        if !(r > S::zero()) || !r.is_finite() {
            return Err(Error::Argument(format!("neighbourhood radius {r} must be positive")));
        }
        self.neighborhood = r;
        Ok(self)
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn real_dim(&self) -> usize {
        2 * self.dim()
    }

    /// Every member has Euclidean norm at most this.
    pub fn bounding_radius(&self) -> S {
        self.shape.bounding_radius()
    }

    /// A ball containing Ω.
    pub fn enclosing_ball(&self) -> (Vec<S>, S) {
        self.shape.enclosing_ball()
    }

    /// A fixed interior point used as the origin of boundary ray casts.
    pub fn center(&self) -> Vec<S> {
        self.shape.center()
    }

    pub fn tag(&self) -> String {
        self.shape.tag()
    }

    pub fn rho(&self, z: &[S]) -> S {
        self.shape.rho(z) * self.scale
    }

    pub fn contains(&self, z: &[S]) -> bool {
        z.len() == self.real_dim() && self.rho(z) < S::zero()
    }

    /// Closed-form gradient where registered, central differences otherwise.
    pub fn gradient(&self, z: &[S]) -> Vec<S> {
        let g = self.shape.gradient(z).unwrap_or_else(|| {
            let h = S::fd_step();
            let two_h = h + h;
            let mut w = z.to_vec();
            (0..z.len())
                .map(|k| {
                    let x = w[k];
                    w[k] = x + h;
                    let up = self.shape.rho(&w);
                    w[k] = x - h;
                    let down = self.shape.rho(&w);
                    w[k] = x;
                    (up - down) / two_h
                })
                .collect()
        });
        linalg::scale(&g, self.scale)
    }

    /// First-order distance from a boundary point to the non-smooth seam of
    /// capped domains; `None` for domains without one.
    pub fn seam_gap(&self, z: &[S]) -> Option<S> {
        self.shape.seam_gap(z)
    }

    pub(crate) fn check_dim(&self, z: &[S]) -> Result<()> {
        if z.len() != self.real_dim() {
            return Err(Error::Argument(format!(
                "point has {} real coordinates, domain {} needs {}",
                z.len(),
                self.tag(),
                self.real_dim()
            )));
        }
        Ok(())
    }

    pub(crate) fn require_interior(&self, z: &[S]) -> Result<()> {
        self.check_dim(z)?;
        if !self.contains(z) {
            return Err(Error::Domain(format!("point {z:?} is not inside {}", self.tag())));
        }
        Ok(())
    }

    /// Exit distance along the unit direction `u` from the interior point `p`.
    pub fn ray_exit(&self, p: &[S], u: &[S]) -> RayHit<S> {
        if let Some(t) = self.shape.ray_exit_exact(p, u) {
            let pad = S::lit(8.0) * S::epsilon() * (t + self.bounding_radius());
            return RayHit { lo: (t - pad).max(S::zero()), hi: t + pad };
        }
        let mut lo = S::zero();
        let mut hi = S::lit(2.0) * self.bounding_radius() + linalg::norm(p);
        let stop = S::lit(1e-12).max(S::epsilon() * S::lit(16.0)) * self.bounding_radius();
        while hi - lo > stop {
            let mid = (lo + hi) * S::lit(0.5);
            if self.contains(&linalg::axpy(p, mid, u)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        RayHit { lo, hi }
    }

    /// Builds the boundary frame at `ξ`.
    pub fn boundary_point(&self, xi: &[S]) -> Result<BoundaryPoint<S>> {
        self.boundary_point_aligned(xi, S::zero())
    }

    pub(crate) fn boundary_point_aligned(&self, xi: &[S], alignment: S) -> Result<BoundaryPoint<S>> {
        self.check_dim(xi)?;
        let r = self.bounding_radius();
        if let Some(gap) = self.seam_gap(xi) {
            if gap < S::lit(SEAM_CLEARANCE) * r {
                return Err(Error::Domain(format!(
                    "boundary point {xi:?} lies within {SEAM_CLEARANCE}·R of the seam of {}",
                    self.tag()
                )));
            }
        }
        let grad = self.gradient(xi);
        let gnorm = linalg::norm(&grad);
        if !(gnorm >= S::lit(GRADIENT_FLOOR)) {
            return Err(Error::IllConditionedBoundary(gnorm.f64()));
        }
        let off = self.rho(xi).abs() / gnorm;
        if off > S::lit(1e-6) * r {
            return Err(Error::Domain(format!("{xi:?} is {off} away from the boundary of {}", self.tag())));
        }
        let normal = linalg::scale(&grad, -S::one() / gnorm);
        let tangents = complex_orthogonal_complement(&normal);
        Ok(BoundaryPoint { xi: xi.to_vec(), normal, tangents, gradient_norm: gnorm, alignment })
    }

    /// The supporting complex hyperplane `ξ + T^ℂ_ξ(∂Ω)`.
    pub fn complex_tangent_hyperplane(&self, bp: &BoundaryPoint<S>) -> Result<ComplexHyperplane<S>> {
        let g = linalg::norm(&self.gradient(&bp.xi));
        if !(g >= S::lit(GRADIENT_FLOOR)) {
            return Err(Error::IllConditionedBoundary(g.f64()));
        }
        Ok(ComplexHyperplane { point: bp.xi.clone(), normal: bp.normal.clone(), directions: bp.tangents.clone() })
    }

    /// `count` boundary points: ray casts from [`center`](Self::center) for
    /// smooth shapes, a patch around the marked point for capped ones.
    pub fn boundary_samples(&self, count: usize) -> Result<Vec<BoundaryPoint<S>>> {
        self.shape
            .boundary_sample_points(self, count)
            .into_iter()
            .map(|xi| self.boundary_point(&xi))
            .collect()
    }

    /// Marked boundary point of capped shapes (where the profile is flattest).
    pub fn marked_point(&self) -> Option<Vec<S>> {
        self.shape.marked_point()
    }

    /// Closed-form distance when every complex line meets Ω in a disc.
    pub fn slice_distance(&self, p: &[S], q: &[S]) -> Option<S> {
        self.shape.slice_distance(p, q)
    }

    /// Intersection of Ω with the complex line `p + ℂ·w/‖w‖`, when it is a disc
    /// in the coordinate `ζ ↦ p + ζ·w/‖w‖`.
    pub fn complex_line_slice(&self, p: &[S], w: &[S]) -> Option<Disc<S>> {
        let unit = linalg::normalize(w)?;
        self.shape.complex_line_slice(p, &unit)
    }
}

/// Real vectors `u₁ … u_{n−1}` such that `{η, 𝔍η, u_k, 𝔍u_k}` is orthonormal.
fn complex_orthogonal_complement<S: Scalar>(normal: &[S]) -> Vec<Vec<S>> {
    let dim = normal.len();
    let mut basis = vec![normal.to_vec(), linalg::mul_i(normal)];
    let mut out = Vec::new();
    while basis.len() < dim {
        let best = (0..dim)
            .map(|k| {
                let mut v = vec![S::zero(); dim];
                v[k] = S::one();
                for b in &basis {
                    v = linalg::axpy(&v, -linalg::dot(&v, b), b);
                }
                v
            })
            .max_by(|a, b| linalg::norm(a).partial_cmp(&linalg::norm(b)).expect("finite"))
            .expect("dim > 0");
        // one re-orthogonalisation pass for stability
        let mut v = best;
        for b in &basis {
            v = linalg::axpy(&v, -linalg::dot(&v, b), b);
        }
        let u = linalg::normalize(&v).expect("complement is non-empty");
        basis.push(u.clone());
        basis.push(linalg::mul_i(&u));
        out.push(u);
    }
    out
}

/// Kobayashi distance in a planar disc.
pub fn disc_distance<S: Scalar>(disc: &Disc<S>, a: Complex<S>, b: Complex<S>) -> S {
    let a = (a - disc.center) / disc.radius;
    let b = (b - disc.center) / disc.radius;
    // 1 − x² with x the pseudo-hyperbolic distance
    let one = Complex::new(S::one(), S::zero());
    let denom = (one - b.conj() * a).norm_sqr();
    let x2 = (a - b).norm_sqr() / denom;
    if x2 < S::lit(0.25) {
        return x2.sqrt().atanh();
    }
    let a_eq = (S::one() - a.norm_sqr()) * (S::one() - b.norm_sqr()) / denom;
    ((S::one() + x2.min(S::one()).sqrt()) / a_eq.sqrt()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b2() -> ConvexDomain<f64> {
        ConvexDomain::ball(2).unwrap()
    }

    #[test]
    fn tangent_frame_is_complex_orthonormal() {
        let d = b2();
        let s = 0.5f64.sqrt();
        let bp = d.boundary_point(&[s, 0.0, 0.0, s]).unwrap();
        assert!((linalg::norm(&bp.normal) - 1.0).abs() < 1e-12);
        assert_eq!(bp.tangents.len(), 1);
        let u = &bp.tangents[0];
        let ju = linalg::mul_i(u);
        let jn = linalg::mul_i(&bp.normal);
        for (a, b) in [(u, &bp.normal), (u, &jn), (&ju, &bp.normal), (&ju, &jn)] {
            assert!(linalg::dot(a, b).abs() < 1e-12);
        }
        // inward
        assert!(d.contains(&linalg::axpy(&bp.xi, 1e-3, &bp.normal)));
    }

    #[test]
    fn hyperplane_of_sphere_at_e1() {
        let d = b2();
        let bp = d.boundary_point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let h = d.complex_tangent_hyperplane(&bp).unwrap();
        let p = h.point_at(&[Complex::new(0.3, -0.7)]);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        assert!(((p[2] * p[2] + p[3] * p[3]).sqrt() - (0.58f64).sqrt()).abs() < 1e-12);
        assert!(h.distance(&p) < 1e-15);
        assert!((h.distance(&[0.0, 0.0, 5.0, 1.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn disc_hyperplane_is_a_point() {
        let d = ConvexDomain::<f64>::ball(1).unwrap();
        let bp = d.boundary_point(&[0.6, 0.8]).unwrap();
        let h = d.complex_tangent_hyperplane(&bp).unwrap();
        assert!(h.directions.is_empty());
        assert!((h.distance(&[0.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn not_on_boundary() {
        assert!(matches!(b2().boundary_point(&[0.5, 0.0, 0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn degenerate_gradient() {
        // ρ = |z| − 1 scaled by 1e-10 has gradient norm 1e-10
        let d = b2().scaled(1e-10).unwrap();
        assert!(matches!(d.boundary_point(&[1.0, 0.0, 0.0, 0.0]), Err(Error::IllConditionedBoundary(_))));
    }

    #[test]
    fn ray_exit_matches_sphere() {
        let d = b2();
        let p = [0.5, 0.0, 0.0, 0.0];
        let hit = d.ray_exit(&p, &[0.0, 0.0, 1.0, 0.0]);
        assert!(hit.lo <= 0.75f64.sqrt() && 0.75f64.sqrt() <= hit.hi);
        assert!(hit.hi - hit.lo < 1e-14);
        // bisection path agrees with the closed form
        let q = ConvexDomain::graph(Modulus::log_family(1.0).unwrap(), 1).unwrap();
        let c = q.center();
        let hit = q.ray_exit(&c, &[0.0, -1.0]);
        assert!(hit.hi - hit.lo < 1e-11);
        assert!(q.rho(&linalg::axpy(&c, hit.lo, &[0.0, -1.0])) < 0.0);
        assert!(q.rho(&linalg::axpy(&c, hit.hi, &[0.0, -1.0])) >= 0.0);
    }

    #[test]
    fn slices_are_discs() {
        let d = ConvexDomain::<f64>::ellipsoid(vec![2.0, 1.0]).unwrap();
        let p = [0.3, 0.1, -0.2, 0.4];
        let w = [0.6, -0.2, 0.5, 0.1];
        let disc = d.complex_line_slice(&p, &w).unwrap();
        let u = linalg::normalize(&w).unwrap();
        for k in 0..64 {
            let th = k as f64 / 64.0 * std::f64::consts::TAU;
            let z = disc.center + Complex::from_polar(disc.radius, th);
            let pt = linalg::add(&p, &linalg::complex_scale(&u, z.re, z.im));
            assert!(d.rho(&pt).abs() < 1e-12, "{}", d.rho(&pt));
        }
    }

    #[test]
    fn disc_distance_formula() {
        let unit = Disc { center: Complex::new(0.0, 0.0), radius: 1.0 };
        let v = disc_distance(&unit, Complex::new(0.0, 0.0), Complex::new(0.5, 0.0));
        assert!((v - 0.5 * 3f64.ln()).abs() < 1e-15);
        // translation and dilation invariance
        let big = Disc { center: Complex::new(1.0, 2.0), radius: 3.0 };
        let w = disc_distance(&big, Complex::new(1.0, 2.0), Complex::new(2.5, 2.0));
        assert!((w - v).abs() < 1e-14);
    }

    use crate::modulus::Modulus;
}
