use rayon::prelude::*;

use super::{inscribed_disc_radius, oracle, polygon_radius};
use crate::domain::{BoundaryPoint, ComplexHyperplane, ConvexDomain};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Inputs closer than this fraction of the bounding radius to `∂Ω` are refused.
const CONDITIONING_FLOOR: f64 = 1e-9;
/// Relative padding applied to both ends to absorb rounding in the closed forms.
const ROUNDING_GUARD: f64 = 1e-10;
const EXACT_GUARD: f64 = 1e-12;
const INITIAL_INTERVALS: usize = 16;
/// Adjacent node values differing by more than this factor get split.
const VARIATION: f64 = 1.1;
/// Directions in the exit polygon certifying a contained disc.
const DISC_DIRECTIONS: usize = 1024;
const DISC_CENTERS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceOptions<S> {
    /// Relative change at which segment refinement stops.
    pub tol: S,
    /// Boundary samples whose tangent hyperplanes feed the lower bound.
    pub hyperplanes: usize,
    /// Relative tolerance of the inscribed radii along the segment.
    pub radius_tol: S,
    pub max_intervals: usize,
}

impl<S: Scalar> Default for DistanceOptions<S> {
    fn default() -> Self {
        Self { tol: S::lit(1e-3), hyperplanes: 128, radius_tol: S::lit(1e-2), max_intervals: 1 << 14 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LowerMethod {
    Coincident,
    Hyperplane,
    EnclosingBall,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpperMethod {
    Coincident,
    Slice,
    Segment,
    /// Exact distance in a disc certified to lie in Ω.
    Disc,
    /// Sum of upper brackets over consecutive points of a chain.
    Chain,
}

impl LowerMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Coincident => "coincident",
            Self::Hyperplane => "hyperplane",
            Self::EnclosingBall => "enclosing-ball",
            Self::Zero => "zero",
        }
    }
}

impl UpperMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Coincident => "coincident",
            Self::Slice => "slice",
            Self::Segment => "segment",
            Self::Disc => "disc",
            Self::Chain => "chain",
        }
    }
}

/// `lo ≤ k_Ω(p, q) ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceBracket<S> {
    pub lo: S,
    pub hi: S,
    pub lower: LowerMethod,
    pub upper: UpperMethod,
    /// Hyperplanes tried for `lo`.
    pub hyperplanes: usize,
    /// Segment nodes evaluated for `hi` (0 when no integration ran).
    pub nodes: usize,
    /// Whether the segment refinement met its tolerance.
    pub converged: bool,
}

impl<S: Scalar> DistanceBracket<S> {
    fn coincident() -> Self {
        Self {
            lo: S::zero(),
            hi: S::zero(),
            lower: LowerMethod::Coincident,
            upper: UpperMethod::Coincident,
            hyperplanes: 0,
            nodes: 0,
            converged: true,
        }
    }

    pub fn width(&self) -> S {
        self.hi - self.lo
    }

    pub fn contains(&self, value: S) -> bool {
        self.lo <= value && value <= self.hi
    }
}

fn guard<S: Scalar>(v: S) -> S {
    S::lit(ROUNDING_GUARD) * (S::one() + v)
}

/// Rounding slack of the closed forms, which keep full relative accuracy.
fn exact_guard<S: Scalar>(v: S) -> S {
    S::lit(EXACT_GUARD) * (S::one() + v)
}

/// An interior point with its nearest-boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedPoint<S> {
    pub z: Vec<S>,
    /// Complex tangent hyperplane at the projection of `z`, if it converged.
    pub plane: Option<ComplexHyperplane<S>>,
    /// `δ_Ω(z)`, or an upper bound for it.
    pub gap: S,
}

/// Bracket on a Gromov product `(x|y)_o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GromovBracket<S> {
    pub lo: S,
    pub hi: S,
}

/// A domain with its sampled supporting hyperplanes cached.
#[derive(Debug, Clone)]
pub struct DistanceEngine<S> {
    domain: ConvexDomain<S>,
    opts: DistanceOptions<S>,
    planes: Vec<ComplexHyperplane<S>>,
}

impl<S: Scalar> DistanceEngine<S> {
    pub fn new(domain: ConvexDomain<S>, opts: DistanceOptions<S>) -> Self {
        let planes = domain
            .shape()
            .boundary_sample_points(&domain, opts.hyperplanes)
            .into_iter()
            .filter_map(|xi| domain.boundary_point(&xi).ok())
            .filter_map(|bp| domain.complex_tangent_hyperplane(&bp).ok())
            .collect();
        Self { domain, opts, planes }
    }

    pub fn domain(&self) -> &ConvexDomain<S> {
        &self.domain
    }

    pub fn options(&self) -> &DistanceOptions<S> {
        &self.opts
    }

    /// Nearest boundary point, when the projection converges.
    fn projection(&self, z: &[S]) -> Option<(BoundaryPoint<S>, S)> {
        self.domain.boundary_project(z, self.domain.bounding_radius()).ok()
    }

    /// Checks `z` and caches its boundary projection for repeated brackets.
    pub fn prepare(&self, z: &[S]) -> Result<PreparedPoint<S>> {
        self.domain.require_interior(z)?;
        let (plane, gap) = match self.projection(z) {
            Some((bp, d)) => (self.domain.complex_tangent_hyperplane(&bp).ok(), d),
            None => (None, self.ray_gap(z)),
        };
        let floor = S::lit(CONDITIONING_FLOOR) * self.domain.bounding_radius();
        if gap < floor {
            return Err(Error::Conditioning(format!("point {z:?} is {gap} from the boundary")));
        }
        Ok(PreparedPoint { z: z.to_vec(), plane, gap })
    }

    /// `½|log(dist(p,H)/dist(q,H))|` maximised over the candidate hyperplanes.
    pub fn hyperplane_lower(&self, p: &[S], q: &[S], extra: &[ComplexHyperplane<S>]) -> (S, usize) {
        let own: Vec<ComplexHyperplane<S>> = [p, q]
            .iter()
            .filter_map(|z| self.projection(z))
            .filter_map(|(bp, _)| self.domain.complex_tangent_hyperplane(&bp).ok())
            .collect();
        self.planes_lower(p, q, own.iter().chain(extra))
    }

    fn planes_lower<'a>(
        &'a self,
        p: &[S],
        q: &[S],
        candidates: impl Iterator<Item = &'a ComplexHyperplane<S>>,
    ) -> (S, usize) {
        let mut best = S::zero();
        let mut count = 0;
        // |⟨z − ξ, η⟩| is computed from coordinates of size ~R, so each plane
        // distance carries an absolute error of a few ulps of R
        let (c, radius) = self.domain.enclosing_ball();
        let ulps = S::epsilon() * S::lit(4.0 * p.len() as f64) * (radius + linalg::norm(&c));
        for h in candidates.chain(&self.planes) {
            let (dp, dq) = (h.distance(p), h.distance(q));
            if dp > S::zero() && dq > S::zero() {
                let slack = ulps * (S::one() / dp + S::one() / dq);
                best = best.max((dp / dq).ln().abs() * S::lit(0.5) - slack);
                count += 1;
            }
        }
        (best, count)
    }

    pub fn distance_bracket(&self, p: &[S], q: &[S]) -> Result<DistanceBracket<S>> {
        self.distance_bracket_with(p, q, &[])
    }

    /// As [`distance_bracket`](Self::distance_bracket), with further
    /// supporting hyperplanes offered to the lower bound.
    pub fn distance_bracket_with(
        &self,
        p: &[S],
        q: &[S],
        extra: &[ComplexHyperplane<S>],
    ) -> Result<DistanceBracket<S>> {
        self.domain.require_interior(p)?;
        self.domain.require_interior(q)?;
        if p == q {
            return Ok(DistanceBracket::coincident());
        }
        let (a, b) = (self.prepare(p)?, self.prepare(q)?);
        self.bracket_prepared(&a, &b, extra)
    }

    pub fn bracket_prepared(
        &self,
        p: &PreparedPoint<S>,
        q: &PreparedPoint<S>,
        extra: &[ComplexHyperplane<S>],
    ) -> Result<DistanceBracket<S>> {
        if p.z == q.z {
            return Ok(DistanceBracket::coincident());
        }
        // evaluate in a fixed order so that swapping the arguments is exact
        let (a, b) = if linalg::lex_less(&q.z, &p.z) { (q, p) } else { (p, q) };
        let (lo, lower, hyperplanes) = self.lower_prepared(a, b, extra);
        let (raw_hi, upper, nodes, converged) = match self.domain.slice_distance(&a.z, &b.z) {
            Some(v) => (v, UpperMethod::Slice, 0, true),
            None => {
                let (v, n, ok) = self.segment_integral(&a.z, &b.z)?;
                match self.disc_upper(a, b) {
                    Some(d) if d < v => (d, UpperMethod::Disc, n, true),
                    _ => (v, UpperMethod::Segment, n, ok),
                }
            }
        };
        let slack = if upper == UpperMethod::Slice { exact_guard(raw_hi) } else { guard(raw_hi) };
        let hi = (raw_hi + slack).max(lo);
        Ok(DistanceBracket { lo, hi, lower, upper, hyperplanes, nodes, converged })
    }

    /// Guarded lower bound: the best supporting hyperplane or the enclosing ball.
    pub fn lower_prepared(
        &self,
        a: &PreparedPoint<S>,
        b: &PreparedPoint<S>,
        extra: &[ComplexHyperplane<S>],
    ) -> (S, LowerMethod, usize) {
        let own = a.plane.iter().chain(b.plane.iter()).chain(extra);
        let (hyper, count) = self.planes_lower(&a.z, &b.z, own);
        let (c, radius) = self.domain.enclosing_ball();
        let ball = oracle::ball_distance(&c, radius, &a.z, &b.z);
        let (raw, method) =
            if hyper >= ball { (hyper, LowerMethod::Hyperplane) } else { (ball, LowerMethod::EnclosingBall) };
        let lo = match method {
            LowerMethod::EnclosingBall => raw - exact_guard(raw),
            _ => raw - guard(raw),
        };
        if lo > S::zero() {
            (lo, method, count)
        } else {
            (S::zero(), LowerMethod::Zero, count)
        }
    }

    /// Whether `[p, q]` lies in a complex line with a closed-form slice.
    pub fn has_slice(&self, p: &[S], q: &[S]) -> bool {
        self.domain.complex_line_slice(p, &linalg::sub(q, p)).is_some()
    }

    /// Distance to `∂Ω`, or an upper bound for it when the projection fails.
    pub fn boundary_gap(&self, z: &[S]) -> S {
        match self.projection(z) {
            Some((_, d)) => d,
            None => self.ray_gap(z),
        }
    }

    fn ray_gap(&self, z: &[S]) -> S {
        crate::sampling::direction_set::<S>(self.domain.real_dim(), 64)
            .iter()
            .map(|u| self.domain.ray_exit(z, u).hi)
            .fold(S::infinity(), S::min)
    }

    /// Upper bound from discs in the complex line through `p` and `q` whose
    /// centers lie on the ray from the shallower point through the other. A
    /// disc of radius `R` is certified by the exit polygon about its center,
    /// and the points sit on one of its diameters, so the distance is
    /// `|atanh(x_q) − atanh(x_p)|` in closed form. Near a boundary point
    /// without an inner tangent disc this still keeps the shallower point at
    /// almost its true depth, which the segment bound cannot do.
    pub fn disc_upper(&self, a: &PreparedPoint<S>, b: &PreparedPoint<S>) -> Option<S> {
        let (p, q) = if b.gap < a.gap { (b, a) } else { (a, b) };
        let w = linalg::sub(&q.z, &p.z);
        let len = linalg::norm(&w);
        let u = linalg::normalize(&w)?;
        let ju = linalg::mul_i(&u);
        let half = S::lit(0.5);
        let ratio = S::lit(2f64.sqrt());
        let mut mu = len * half;
        let mut best: Option<S> = None;
        let mut best_depth = S::zero();
        for _ in 0..DISC_CENTERS {
            let c = linalg::axpy(&p.z, mu, &u);
            if !self.domain.contains(&c) {
                break;
            }
            let (r, _) = polygon_radius(&self.domain, &c, &u, &ju, DISC_DIRECTIONS);
            // depth of the shallower point inside the disc
            let depth = r - mu;
            if depth > S::zero() && r > (len - mu).abs() {
                let k = ((r + len - mu) / (r - len + mu)).ln() * half - (depth / (r + mu)).ln() * half;
                let k = k.abs();
                best = Some(best.map_or(k, |b: S| b.min(k)));
            }
            // the depth is concave in the center position
            if depth < best_depth * half {
                break;
            }
            best_depth = best_depth.max(depth);
            mu = mu * ratio;
        }
        best
    }

    /// Trapezoid sums of `‖v‖/r_lo` along `[a, b]`. The exact integrand
    /// `‖v‖/r` is convex in the segment parameter (the inscribed radius is
    /// concave by convexity of Ω), so every sum bounds the integral from above.
    fn segment_integral(&self, a: &[S], b: &[S]) -> Result<(S, usize, bool)> {
        let v = linalg::sub(b, a);
        let len = linalg::norm(&v);
        let eval = |s: S| -> Result<S> {
            let z = linalg::axpy(a, s, &v);
            let r = inscribed_disc_radius(&self.domain, &z, &v, self.opts.radius_tol)?;
            Ok(len / r.lo)
        };
        let mut nodes: Vec<(S, S)> = (0..=INITIAL_INTERVALS)
            .into_par_iter()
            .map(|k| {
                let s = S::of(k) / S::of(INITIAL_INTERVALS);
                eval(s).map(|f| (s, f))
            })
            .collect::<Result<_>>()?;
        let trapezoid = |nodes: &[(S, S)]| -> S {
            nodes.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * S::lit(0.5)).sum()
        };
        let mut best = trapezoid(&nodes);
        let mut evaluated = nodes.len();
        loop {
            let intervals = nodes.len() - 1;
            let split: Vec<usize> = (0..intervals)
                .filter(|&k| {
                    let (f0, f1) = (nodes[k].1, nodes[k + 1].1);
                    f0.max(f1) > S::lit(VARIATION) * f0.min(f1)
                })
                .collect();
            // once the integrand is flat enough everywhere, halve every interval
            let split: Vec<usize> = if split.is_empty() { (0..intervals).collect() } else { split };
            if intervals + split.len() > self.opts.max_intervals {
                return Ok((best, evaluated, false));
            }
            let mids: Vec<(usize, S, S)> = split
                .par_iter()
                .map(|&k| {
                    let s = (nodes[k].0 + nodes[k + 1].0) * S::lit(0.5);
                    eval(s).map(|f| (k, s, f))
                })
                .collect::<Result<_>>()?;
            evaluated += mids.len();
            let mut next = Vec::with_capacity(nodes.len() + mids.len());
            let mut m = mids.iter().peekable();
            for (k, node) in nodes.iter().enumerate() {
                next.push(*node);
                if let Some(&&(j, s, f)) = m.peek() {
                    if j == k {
                        next.push((s, f));
                        m.next();
                    }
                }
            }
            nodes = next;
            let value = trapezoid(&nodes);
            let change = (best - value).abs();
            best = best.min(value);
            if change <= self.opts.tol * best {
                return Ok((best, evaluated, true));
            }
        }
    }

    /// `(x|y)_o`, from three distance brackets.
    pub fn gromov_product(&self, x: &[S], y: &[S], o: &[S]) -> Result<GromovBracket<S>> {
        let xo = self.distance_bracket(x, o)?;
        let yo = self.distance_bracket(y, o)?;
        let xy = self.distance_bracket(x, y)?;
        let half = S::lit(0.5);
        let lo = ((xo.lo + yo.lo - xy.hi) * half).max(S::zero());
        let hi = ((xo.hi + yo.hi - xy.lo) * half).max(lo);
        Ok(GromovBracket { lo, hi })
    }

    /// `max (hi(z₀, z) − ½log(1/δ_Ω(z)))` over points `z = ξ + δ·R·η` at the
    /// boundary samples `ξ` and relative depths `δ`.
    pub fn escape_constant(&self, z0: &[S], samples: usize, depths: &[S]) -> Result<EscapeReport<S>> {
        let origin = self.prepare(z0)?;
        if samples == 0 || depths.is_empty() {
            return Err(Error::Argument("escape constant needs samples and depths".into()));
        }
        let r = self.domain.bounding_radius();
        let points: Vec<BoundaryPoint<S>> = self
            .domain
            .shape()
            .boundary_sample_points(&self.domain, samples)
            .into_iter()
            .filter_map(|xi| self.domain.boundary_point(&xi).ok())
            .collect();
        if points.is_empty() {
            return Err(Error::Sampling("no usable boundary samples".into()));
        }
        let mut depths = depths.to_vec();
        depths.sort_by(|a, b| b.partial_cmp(a).expect("finite depths"));
        let profile: Vec<(S, S)> = depths
            .par_iter()
            .map(|&d| {
                let mut worst = S::neg_infinity();
                for bp in &points {
                    let z = linalg::axpy(&bp.xi, d * r, &bp.normal);
                    if !self.domain.contains(&z) {
                        continue;
                    }
                    let pz = self.prepare(&z)?;
                    let gap = pz.gap.min(d * r);
                    let k = self.bracket_prepared(&origin, &pz, &[])?;
                    worst = worst.max(k.hi - (S::one() / gap).ln() * S::lit(0.5));
                }
                Ok((d, worst))
            })
            .collect::<Result<_>>()?;
        let constant = profile.iter().map(|p| p.1).fold(S::neg_infinity(), S::max);
        let slack = S::lit(4.0) * self.opts.tol;
        let monotone = profile.windows(2).all(|w| w[1].1 >= w[0].1 - slack * (S::one() + w[0].1.abs()));
        Ok(EscapeReport { constant, profile, samples: points.len(), monotone })
    }

    /// Lower brackets between `ξ + δη` and `ξ′ + δη′` against
    /// `½log(1/δ_Ω(p)) + ½log(1/δ_Ω(q))`; the fitted constant is the largest
    /// shortfall.
    pub fn two_tangent_profile(
        &self,
        xi: &BoundaryPoint<S>,
        xi2: &BoundaryPoint<S>,
        depths: &[S],
    ) -> Result<TwoTangentReport<S>> {
        let r = self.domain.bounding_radius();
        let rows: Vec<(S, S)> = depths
            .par_iter()
            .map(|&d| {
                let p = linalg::axpy(&xi.xi, d * r, &xi.normal);
                let q = linalg::axpy(&xi2.xi, d * r, &xi2.normal);
                let (pp, pq) = (self.prepare(&p)?, self.prepare(&q)?);
                let k = self.bracket_prepared(&pp, &pq, &[])?;
                let half = S::lit(0.5);
                let gp = pp.gap.min(d * r);
                let gq = pq.gap.min(d * r);
                Ok((d, (S::one() / gp).ln() * half + (S::one() / gq).ln() * half - k.lo))
            })
            .collect::<Result<_>>()?;
        let c_fit = rows.iter().map(|r| r.1).fold(S::neg_infinity(), S::max);
        Ok(TwoTangentReport { rows, c_fit })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeReport<S> {
    pub constant: S,
    /// `(relative depth, worst value at that depth)`, deepest last.
    pub profile: Vec<(S, S)>,
    pub samples: usize,
    /// The profile never drops by more than the integration tolerance as the
    /// depth shrinks.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoTangentReport<S> {
    /// `(relative depth, shortfall)`.
    pub rows: Vec<(S, S)>,
    pub c_fit: S,
}

/// `count` relative depths, geometric over `[1e-6, 1e-1]`.
pub fn default_depths<S: Scalar>(count: usize) -> Vec<S> {
    let count = count.max(2);
    (0..count)
        .map(|k| S::lit(10.0).powf(-S::one() - S::lit(5.0) * S::of(k) / S::of(count - 1)))
        .collect()
}

pub fn distance_bracket<S: Scalar>(
    domain: &ConvexDomain<S>,
    p: &[S],
    q: &[S],
    opts: DistanceOptions<S>,
) -> Result<DistanceBracket<S>> {
    DistanceEngine::new(domain.clone(), opts).distance_bracket(p, q)
}

pub fn gromov_product<S: Scalar>(
    domain: &ConvexDomain<S>,
    x: &[S],
    y: &[S],
    o: &[S],
    opts: DistanceOptions<S>,
) -> Result<GromovBracket<S>> {
    DistanceEngine::new(domain.clone(), opts).gromov_product(x, y, o)
}

pub fn escape_constant<S: Scalar>(
    domain: &ConvexDomain<S>,
    z0: &[S],
    samples: usize,
    depths: &[S],
    opts: DistanceOptions<S>,
) -> Result<EscapeReport<S>> {
    DistanceEngine::new(domain.clone(), opts).escape_constant(z0, samples, depths)
}

pub fn two_tangent_profile<S: Scalar>(
    domain: &ConvexDomain<S>,
    xi: &[S],
    xi2: &[S],
    depths: &[S],
    opts: DistanceOptions<S>,
) -> Result<TwoTangentReport<S>> {
    let a = domain.boundary_point(xi)?;
    let b = domain.boundary_point(xi2)?;
    DistanceEngine::new(domain.clone(), opts).two_tangent_profile(&a, &b, depths)
}
