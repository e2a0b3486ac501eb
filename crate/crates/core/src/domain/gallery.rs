use num_complex::Complex;

use super::{ConvexDomain, Disc};
use crate::error::{Error, Result};
use crate::linalg;
use crate::modulus::{HTransform, Modulus};
use crate::sampling;
use crate::scalar::Scalar;

/// Lower boundary curve `x = g(y)` of a planar profile domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<S> {
    /// `g = α·h` for the h-transform of a modulus.
    Model { h: HTransform<S>, alpha: S },
    /// `g(y) = slope·|y|`, convex but not 𝒞¹ at 0.
    Corner { slope: S },
}

impl<S: Scalar> Profile<S> {
    fn g(&self, y: S, tau: S) -> S {
        let y = y.max(-tau).min(tau);
        match self {
            Profile::Model { h, alpha } => *alpha * h.eval(y).expect("|y| <= tau < 2r"),
            Profile::Corner { slope } => *slope * y.abs(),
        }
    }

    fn slope_at(&self, y: S, tau: S) -> S {
        let y = y.max(-tau).min(tau);
        match self {
            Profile::Model { h, alpha } => *alpha * h.derivative(y).expect("|y| <= tau < 2r"),
            Profile::Corner { .. } if y == S::zero() => S::zero(),
            Profile::Corner { slope } => *slope * y.signum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape<S> {
    /// `{‖z‖ < radius}` with `ρ = ‖z‖ − radius`.
    Ball { n: usize, radius: S },
    /// `{Σ|z_j|²/a_j² < 1}` with `ρ = (Σ|z_j|²/a_j²)^{1/2} − 1`.
    Ellipsoid { axes: Vec<S> },
    /// `{max|z_j| < 1}`; convex but not 𝒞¹.
    Polydisc { n: usize },
    /// `{x + iy : |y| < τ, g(y) < x < τ}` in ℂ.
    Profile { profile: Profile<S>, tau: S },
    /// `{Im z_n > Φ(z′, Re z_n)} ∩ B(i·c·e_n, R_cap)` with
    /// `Φ = H(Re z_n) + |z′|²` and `H` the h-transform continued linearly past
    /// `knee`.
    Graph { n: usize, h: HTransform<S>, knee: S, cap_center: S, cap_radius: S },
}

const GRAPH_CAP_CENTER: f64 = 1.5;
const GRAPH_CAP_RADIUS: f64 = 2.0;
const GRAPH_PATCH: f64 = 0.2;

impl<S: Scalar> ConvexDomain<S> {
    pub fn ball(n: usize) -> Result<Self> {
        Self::ball_with_radius(n, S::one())
    }

    pub fn ball_with_radius(n: usize, radius: S) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("complex dimension must be at least 1".into()));
        }
        if !(radius > S::zero()) || !radius.is_finite() {
            return Err(Error::Argument(format!("ball radius {radius} must be positive")));
        }
        Ok(Self::from_shape(Shape::Ball { n, radius }))
    }

    /// The unit disc 𝔻 ⊂ ℂ.
    pub fn disc() -> Self {
        Self::from_shape(Shape::Ball { n: 1, radius: S::one() })
    }

    pub fn ellipsoid(axes: Vec<S>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| !(*a > S::zero()) || !a.is_finite()) {
            return Err(Error::Argument(format!("ellipsoid axes {axes:?} must be positive")));
        }
        Ok(Self::from_shape(Shape::Ellipsoid { axes }))
    }

    pub fn polydisc(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("complex dimension must be at least 1".into()));
        }
        Ok(Self::from_shape(Shape::Polydisc { n }))
    }

    /// Planar domain bounded below by `α·h`, with `h` built on the largest
    /// radius `ω` allows. Requires `τ < ε₀`.
    pub fn profile(modulus: Modulus<S>, alpha: S, tau: S) -> Result<Self> {
        if !(alpha > S::zero()) || !alpha.is_finite() {
            return Err(Error::Argument(format!("profile alpha {alpha} must be positive")));
        }
        let r = modulus.radius() * S::lit(0.5);
        if !(tau > S::zero() && tau < r + r) {
            return Err(Error::Argument(format!("profile tau {tau} must lie in (0, {})", r + r)));
        }
        let h = HTransform::new(modulus, r)?;
        Ok(Self::from_shape(Shape::Profile { profile: Profile::Model { h, alpha }, tau }))
    }

    pub fn corner_profile(slope: S, tau: S) -> Result<Self> {
        if !(slope > S::zero()) || !(tau > S::zero()) {
            return Err(Error::Argument("corner profile needs positive slope and tau".into()));
        }
        Ok(Self::from_shape(Shape::Profile { profile: Profile::Corner { slope }, tau }))
    }

    /// Graph domain over the h-transform of `ω` in the `Re z_n` direction.
    pub fn graph(modulus: Modulus<S>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("complex dimension must be at least 1".into()));
        }
        let r = modulus.radius() * S::lit(0.5);
        let h = HTransform::new(modulus, r)?;
        Ok(Self::from_shape(Shape::Graph {
            n,
            h,
            knee: r,
            cap_center: S::lit(GRAPH_CAP_CENTER),
            cap_radius: S::lit(GRAPH_CAP_RADIUS),
        }))
    }

    /// Parses `disc`, `ball:<n>[:<R>]`, `ellipsoid:<a1,...,an>`, `polydisc:<n>`,
    /// `profile:<modulus>:<alpha>:<tau>` or `graph:<modulus>:<n>`.
    pub fn parse(literal: &str) -> Result<Self> {
        let (kind, rest) = literal.split_once(':').unwrap_or((literal, ""));
        let num = |s: &str| -> Result<S> {
            s.trim()
                .parse::<f64>()
                .map(S::lit)
                .map_err(|_| Error::Parse(format!("bad number `{s}` in domain literal `{literal}`")))
        };
        let count = |s: &str| -> Result<usize> {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension `{s}` in domain literal `{literal}`")))
        };
        match kind {
            "disc" if rest.is_empty() => Ok(Self::disc()),
            "ball" => match rest.split_once(':') {
                Some((n, r)) => Self::ball_with_radius(count(n)?, num(r)?),
                None => Self::ball(count(rest)?),
            },
            "ellipsoid" => Self::ellipsoid(rest.split(',').map(num).collect::<Result<_>>()?),
            "polydisc" => Self::polydisc(count(rest)?),
            "profile" => {
                let mut it = rest.rsplitn(3, ':');
                let (tau, alpha, m) = match (it.next(), it.next(), it.next()) {
                    (Some(t), Some(a), Some(m)) => (t, a, m),
                    _ => return Err(Error::Parse(format!("`{literal}` is not profile:<modulus>:<alpha>:<tau>"))),
                };
                Self::profile(Modulus::parse(m)?, num(alpha)?, num(tau)?)
            }
            "graph" => {
                let (m, n) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Parse(format!("`{literal}` is not graph:<modulus>:<n>")))?;
                Self::graph(Modulus::parse(m)?, count(n)?)
            }
            other => Err(Error::Parse(format!("unknown domain kind `{other}`"))),
        }
    }
}

impl<S: Scalar> Shape<S> {
    pub(crate) fn dim(&self) -> usize {
        match self {
            Shape::Ball { n, .. } | Shape::Polydisc { n } | Shape::Graph { n, .. } => *n,
            Shape::Ellipsoid { axes } => axes.len(),
            Shape::Profile { .. } => 1,
        }
    }

    pub(crate) fn tag(&self) -> String {
        match self {
            Shape::Ball { n, radius } if *radius == S::one() => format!("ball:{n}"),
            Shape::Ball { n, radius } => format!("ball:{n}:{radius}"),
            Shape::Ellipsoid { axes } => {
                format!("ellipsoid:{}", axes.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
            }
            Shape::Polydisc { n } => format!("polydisc:{n}"),
            Shape::Profile { profile: Profile::Model { h, alpha }, tau } => {
                format!("profile:{}:{alpha}:{tau}", h.modulus().label())
            }
            Shape::Profile { profile: Profile::Corner { slope }, tau } => format!("corner:{slope}:{tau}"),
            Shape::Graph { n, h, .. } => format!("graph:{}:{n}", h.modulus().label()),
        }
    }

    pub(crate) fn default_neighborhood(&self) -> S {
        let quarter = S::lit(0.25);
        match self {
            Shape::Ball { radius, .. } => *radius * quarter,
            Shape::Ellipsoid { axes } => axes.iter().copied().fold(S::infinity(), S::min) * quarter,
            Shape::Polydisc { .. } => quarter,
            Shape::Profile { tau, .. } => *tau * quarter,
            Shape::Graph { .. } => S::lit(0.125),
        }
    }

    pub(crate) fn bounding_radius(&self) -> S {
        match self {
            Shape::Ball { radius, .. } => *radius,
            Shape::Ellipsoid { axes } => axes.iter().copied().fold(S::zero(), S::max),
            Shape::Polydisc { n } => S::of(*n).sqrt(),
            Shape::Profile { tau, .. } => *tau * S::SQRT_2(),
            Shape::Graph { cap_center, cap_radius, .. } => *cap_center + *cap_radius,
        }
    }

    pub(crate) fn enclosing_ball(&self) -> (Vec<S>, S) {
        let dim = 2 * self.dim();
        match self {
            Shape::Profile { tau, .. } => {
                let half = *tau * S::lit(0.5);
                (vec![half, S::zero()], (half * half + *tau * *tau).sqrt())
            }
            Shape::Graph { cap_center, cap_radius, .. } => {
                let mut c = vec![S::zero(); dim];
                c[dim - 1] = *cap_center;
                (c, *cap_radius)
            }
            _ => (vec![S::zero(); dim], self.bounding_radius()),
        }
    }

    pub(crate) fn center(&self) -> Vec<S> {
        let dim = 2 * self.dim();
        match self {
            Shape::Profile { tau, .. } => vec![*tau * S::lit(0.5), S::zero()],
            Shape::Graph { cap_center, .. } => {
                let mut c = vec![S::zero(); dim];
                c[dim - 1] = *cap_center * S::lit(0.5);
                c
            }
            _ => vec![S::zero(); dim],
        }
    }

    pub(crate) fn marked_point(&self) -> Option<Vec<S>> {
        match self {
            Shape::Profile { .. } | Shape::Graph { .. } => Some(vec![S::zero(); 2 * self.dim()]),
            _ => None,
        }
    }

    /// `H`: the h-transform continued linearly (hence convexly) past the knee.
    fn graph_h(h: &HTransform<S>, knee: S, x: S) -> (S, S) {
        let a = x.abs();
        if a <= knee {
            (h.eval(x).expect("inside knee"), h.derivative(x).expect("inside knee"))
        } else {
            let slope = h.derivative(knee).expect("knee < 2r");
            (h.eval(knee).expect("knee < 2r") + slope * (a - knee), slope * x.signum())
        }
    }

    /// Values of the convex pieces whose maximum is `ρ`, with their gradients.
    fn pieces(&self, z: &[S]) -> Vec<(S, Vec<S>)> {
        match self {
            Shape::Profile { profile, tau } => {
                let (x, y) = (z[0], z[1]);
                vec![
                    (profile.g(y, *tau) - x, vec![-S::one(), profile.slope_at(y, *tau)]),
                    (y.abs() - *tau, vec![S::zero(), y.signum()]),
                    (x - *tau, vec![S::one(), S::zero()]),
                ]
            }
            Shape::Graph { n, h, knee, cap_center, cap_radius } => {
                let dim = 2 * n;
                let (hv, hd) = Self::graph_h(h, *knee, z[dim - 2]);
                let mut g = vec![S::zero(); dim];
                let mut phi = hv;
                for k in 0..dim - 2 {
                    phi = phi + z[k] * z[k];
                    g[k] = z[k] + z[k];
                }
                g[dim - 2] = hd;
                g[dim - 1] = -S::one();
                let mut off = z.to_vec();
                off[dim - 1] = off[dim - 1] - *cap_center;
                let r = linalg::norm(&off);
                let cap_grad = if r > S::zero() { linalg::scale(&off, S::one() / r) } else { off.clone() };
                vec![(phi - z[dim - 1], g), (r - *cap_radius, cap_grad)]
            }
            _ => Vec::new(),
        }
    }

    pub(crate) fn rho(&self, z: &[S]) -> S {
        match self {
            Shape::Ball { radius, .. } => linalg::norm(z) - *radius,
            Shape::Ellipsoid { axes } => {
                let q: S = z.iter().enumerate().map(|(k, x)| (*x / axes[k / 2]).powi(2)).sum();
                q.sqrt() - S::one()
            }
            Shape::Polydisc { .. } => {
                z.chunks(2).map(|c| c[0].hypot(c[1])).fold(S::neg_infinity(), S::max) - S::one()
            }
            _ => self.pieces(z).into_iter().map(|p| p.0).fold(S::neg_infinity(), S::max),
        }
    }

    pub(crate) fn gradient(&self, z: &[S]) -> Option<Vec<S>> {
        match self {
            Shape::Ball { .. } => {
                let r = linalg::norm(z);
                (r > S::zero()).then(|| linalg::scale(z, S::one() / r))
            }
            Shape::Ellipsoid { axes } => {
                let q: S = z.iter().enumerate().map(|(k, x)| (*x / axes[k / 2]).powi(2)).sum::<S>().sqrt();
                (q > S::zero())
                    .then(|| z.iter().enumerate().map(|(k, x)| *x / (axes[k / 2] * axes[k / 2] * q)).collect())
            }
            Shape::Polydisc { .. } => None,
            _ => {
                let pieces = self.pieces(z);
                let best = pieces.iter().map(|p| p.0).fold(S::neg_infinity(), S::max);
                // a kink (two active pieces) has no gradient: fall back to differences
                let active: Vec<_> = pieces.into_iter().filter(|p| best - p.0 <= S::lit(1e-9)).collect();
                (active.len() == 1).then(|| active.into_iter().next().expect("one piece").1)
            }
        }
    }

    pub(crate) fn seam_gap(&self, z: &[S]) -> Option<S> {
        let pieces = self.pieces(z);
        if pieces.is_empty() {
            return None;
        }
        let best = pieces.iter().enumerate().max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).expect("finite"))?.0;
        pieces
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != best)
            .map(|(_, (v, g))| v.abs() / linalg::norm(g).max(S::epsilon()))
            .reduce(S::min)
    }

    pub(crate) fn ray_exit_exact(&self, p: &[S], u: &[S]) -> Option<S> {
        let positive_root = |a: S, b: S, c: S| -> Option<S> {
            // a t² + 2 b t + c = 0 with c < 0 (start inside)
            if a <= S::zero() {
                return None;
            }
            let disc = (b * b - a * c).max(S::zero()).sqrt();
            // stable form of (−b + disc)/a
            Some(if b <= S::zero() { (disc - b) / a } else { -c / (b + disc) })
        };
        match self {
            Shape::Ball { radius, .. } => {
                positive_root(linalg::dot(u, u), linalg::dot(p, u), linalg::dot(p, p) - *radius * *radius)
            }
            Shape::Ellipsoid { axes } => {
                let w = |k: usize| S::one() / (axes[k / 2] * axes[k / 2]);
                let a = u.iter().enumerate().map(|(k, x)| *x * *x * w(k)).sum();
                let b = u.iter().zip(p).enumerate().map(|(k, (x, y))| *x * *y * w(k)).sum();
                let c = p.iter().enumerate().map(|(k, y)| *y * *y * w(k)).sum::<S>() - S::one();
                positive_root(a, b, c)
            }
            Shape::Polydisc { .. } => p
                .chunks(2)
                .zip(u.chunks(2))
                .filter_map(|(pc, uc)| {
                    positive_root(
                        uc[0] * uc[0] + uc[1] * uc[1],
                        pc[0] * uc[0] + pc[1] * uc[1],
                        pc[0] * pc[0] + pc[1] * pc[1] - S::one(),
                    )
                })
                .reduce(S::min),
            _ => None,
        }
    }

    pub(crate) fn boundary_sample_points(&self, domain: &ConvexDomain<S>, count: usize) -> Vec<Vec<S>> {
        match self {
            Shape::Profile { profile, tau } => {
                let quarter = *tau * S::lit(0.25);
                (0..count)
                    .map(|k| {
                        let y = if count == 1 {
                            S::zero()
                        } else {
                            -quarter + (quarter + quarter) * S::of(k) / S::of(count - 1)
                        };
                        vec![profile.g(y, *tau), y]
                    })
                    .collect()
            }
            Shape::Graph { n, h, knee, .. } => {
                let dim = 2 * n;
                let mut rng = sampling::rng(sampling::INTERNAL_SEED ^ 0x67);
                let origin = vec![S::zero(); dim - 1];
                (0..count)
                    .map(|k| {
                        let mut base = if k == 0 {
                            origin.clone()
                        } else {
                            sampling::point_in_ball(&mut rng, &origin, S::lit(GRAPH_PATCH))
                        };
                        let phi = Self::graph_h(h, *knee, base[dim - 2]).0
                            + base[..dim - 2].iter().map(|x| *x * *x).sum::<S>();
                        base.push(phi);
                        base
                    })
                    .collect()
            }
            _ => {
                let c = self.center();
                sampling::direction_set(2 * self.dim(), count)
                    .into_iter()
                    .take(count)
                    .map(|d| {
                        let t = domain.ray_exit(&c, &d).mid();
                        linalg::axpy(&c, t, &d)
                    })
                    .collect()
            }
        }
    }

    /// Kobayashi distance for the quadric shapes, where every complex line is a slice.
    pub(crate) fn slice_distance(&self, p: &[S], q: &[S]) -> Option<S> {
        let origin = vec![S::zero(); p.len()];
        match self {
            Shape::Ball { radius, .. } => Some(crate::kobayashi::ball_distance(&origin, *radius, p, q)),
            Shape::Ellipsoid { axes } => {
                let k: Vec<S> = axes.iter().map(|a| S::one() / (*a * *a)).collect();
                Some(crate::kobayashi::quadric_distance(&origin, |i| k[i / 2], p, q))
            }
            _ => None,
        }
    }

    pub(crate) fn complex_line_slice(&self, p: &[S], unit: &[S]) -> Option<Disc<S>> {
        let pc = linalg::to_complex(p);
        let wc = linalg::to_complex(unit);
        let weights: Vec<S> = match self {
            Shape::Ball { n, radius } => vec![S::one() / (*radius * *radius); *n],
            Shape::Ellipsoid { axes } => axes.iter().map(|a| S::one() / (*a * *a)).collect(),
            _ => return None,
        };
        let a: S = wc.iter().zip(&weights).map(|(w, k)| w.norm_sqr() * *k).sum();
        let b: Complex<S> = wc.iter().zip(&pc).zip(&weights).map(|((w, z), k)| *w * z.conj() * *k).sum();
        let c: S = pc.iter().zip(&weights).map(|(z, k)| z.norm_sqr() * *k).sum();
        let r2 = (S::one() - c) / a + b.norm_sqr() / (a * a);
        (r2 > S::zero()).then(|| Disc { center: -b.conj() / a, radius: r2.sqrt() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_literals() {
        let d = ConvexDomain::<f64>::parse("ball:2").unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.tag(), "ball:2");
        assert_eq!(ConvexDomain::<f64>::parse("ellipsoid:2,1").unwrap().tag(), "ellipsoid:2,1");
        let p = ConvexDomain::<f64>::parse("profile:linear:1:8:0.05").unwrap();
        assert_eq!(p.dim(), 1);
        let g = ConvexDomain::<f64>::parse("graph:log:1:2").unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(ConvexDomain::<f64>::parse(&g.tag()).unwrap(), g);
        assert!(matches!(ConvexDomain::<f64>::parse("torus:2"), Err(Error::Parse(m)) if m.contains("unknown domain kind")));
        assert!(ConvexDomain::<f64>::parse("ball:x").is_err());
        assert!(ConvexDomain::<f64>::parse("profile:linear:1:8:3").is_err());
    }

    #[test]
    fn profile_membership() {
        let d = ConvexDomain::<f64>::profile(Modulus::linear(1.0).unwrap(), 1.0, 0.5).unwrap();
        // h(t) = t²/2
        assert!(d.contains(&[0.1, 0.3]));
        assert!(!d.contains(&[0.04, 0.3]));
        assert!(!d.contains(&[0.6, 0.0]));
        assert!(!d.contains(&[0.3, 0.55]));
    }

    #[test]
    fn graph_marked_frame() {
        let d = ConvexDomain::<f64>::graph(Modulus::log_family(1.0).unwrap(), 2).unwrap();
        let bp = d.boundary_point(&[0.0; 4]).unwrap();
        assert!(linalg::dist(&bp.normal, &[0.0, 0.0, 0.0, 1.0]) < 1e-12);
        assert!((bp.gradient_norm - 1.0).abs() < 1e-12);
        for p in d.boundary_samples(16).unwrap() {
            assert!(linalg::norm(&p.xi) < 0.5);
        }
    }

    #[test]
    fn closed_form_gradients_match_differences() {
        let domains = [
            ConvexDomain::<f64>::ellipsoid(vec![2.0, 1.0]).unwrap(),
            ConvexDomain::graph(Modulus::hoelder(0.5, 1.0).unwrap(), 2).unwrap(),
        ];
        let z = [0.05, -0.1, 0.08, 0.3];
        for d in &domains {
            let g = d.gradient(&z);
            let h = 1e-6;
            for k in 0..4 {
                let mut a = z;
                let mut b = z;
                a[k] += h;
                b[k] -= h;
                let fd = (d.rho(&a) - d.rho(&b)) / (2.0 * h);
                assert!((fd - g[k]).abs() < 1e-6, "{} {k}: {fd} vs {}", d.tag(), g[k]);
            }
        }
    }

    #[test]
    fn seam_points_are_rejected() {
        let d = ConvexDomain::<f64>::graph(Modulus::linear(1.0).unwrap(), 1).unwrap();
        // cap sphere meets the graph: walk along the graph until the cap is active
        let c = d.center();
        let hit = d.ray_exit(&c, &[1.0, 0.0]);
        let xi = linalg::axpy(&c, hit.mid(), &[1.0, 0.0]);
        assert!(matches!(d.boundary_point(&xi), Err(Error::Domain(m)) if m.contains("seam")));
    }
}
