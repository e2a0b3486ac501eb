//! The planar model domains `Ω_{α,τ} = {s + it : |t| < τ, α·h(t) < s < τ}`,
//! the choice of `(α, τ)` for a convex domain, and the check that
//! `Ψ_ξ(ζ) = ξ + ζ·η^ξ` maps `Ω_{α,τ}` into the domain.

use rayon::prelude::*;

use crate::domain::{BoundaryPoint, ConvexDomain};
use crate::error::{Error, Result};
use crate::linalg;
use crate::modulus::{HTransform, Modulus};
use crate::quadrature::adaptive_simpson;
use crate::sampling;
use crate::scalar::Scalar;

/// Deflation applied to the sampled gradient minimum.
const GRADIENT_SAFETY: f64 = 0.1;
const PAIRS_PER_RADIUS: usize = 1000;
const TAU_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDomain<S> {
    h: HTransform<S>,
    alpha: S,
    tau: S,
}

impl<S: Scalar> ModelDomain<S> {
    /// Uses the h-transform on the widest interval `ω` allows.
    pub fn new(modulus: Modulus<S>, alpha: S, tau: S) -> Result<Self> {
        let r = modulus.radius() * S::lit(0.5);
        Self::with_h(HTransform::new(modulus, r)?, alpha, tau)
    }

    pub fn with_h(h: HTransform<S>, alpha: S, tau: S) -> Result<Self> {
        if !(alpha >= S::one()) || !alpha.is_finite() {
            return Err(Error::Argument(format!("model domain needs alpha >= 1, got {alpha}")));
        }
        if !(tau > S::zero() && tau < h.half_width()) {
            return Err(Error::Argument(format!("model domain needs 0 < tau < {}, got {tau}", h.half_width())));
        }
        Ok(Self { h, alpha, tau })
    }

    pub fn from_certificate(modulus: Modulus<S>, cert: &ParameterCertificate<S>) -> Result<Self> {
        Self::with_h(HTransform::new(modulus, cert.r)?, cert.alpha, cert.tau)
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }

    pub fn tau(&self) -> S {
        self.tau
    }

    pub fn h(&self) -> &HTransform<S> {
        &self.h
    }

    pub fn modulus(&self) -> &Modulus<S> {
        self.h.modulus()
    }

    pub fn contains(&self, s: S, t: S) -> bool {
        t.abs() < self.tau && s < self.tau && self.alpha * self.h.eval(t).expect("|t| < tau < 2r") < s
    }

    /// Largest `|t|` of a point of the closure with real part `s`:
    /// `min(h⁻¹(s/α), τ)`.
    pub fn t_bound(&self, s: S) -> S {
        if s <= S::zero() {
            return S::zero();
        }
        let x = s / self.alpha;
        if x >= self.h.eval(self.tau).expect("tau < 2r") {
            self.tau
        } else {
            self.h.inverse(x).expect("x below h(tau)")
        }
    }

    fn omega(&self, t: S) -> Result<S> {
        self.modulus().eval(t.abs())
    }

    /// Tangent angle `θ̂(y) = atan(α·h′(y))` and arc length `G(y)` of the
    /// lower boundary curve.
    pub fn boundary_geometry(&self, y: S) -> Result<(S, S)> {
        if !(y.abs() < self.tau) {
            return Err(Error::Domain(format!("boundary geometry needs |y| < tau = {}, got {y}", self.tau)));
        }
        let theta = (self.alpha * self.h.derivative(y)?).atan();
        Ok((theta, self.arc_length(y)?))
    }

    fn arc_length(&self, y: S) -> Result<S> {
        if y == S::zero() {
            return Ok(S::zero());
        }
        let a = self.alpha;
        let m = self.modulus();
        m.eval(y.abs())?;
        let speed = |t: S| (S::one() + (a * m.eval_unchecked(t)).powi(2)).sqrt();
        let tol = S::lit(1e-13).max(S::epsilon() * S::lit(64.0));
        let q = adaptive_simpson(speed, S::zero(), y.abs(), tol * y.abs(), 48);
        Ok(if y < S::zero() { -q.value } else { q.value })
    }

    /// `G⁻¹(s)` to 1e-12 by Newton steps kept inside a shrinking bracket.
    /// The speed `G′` is nondecreasing in `|y|`, so `s/G′(s) ≤ G⁻¹(s) ≤ s`.
    fn arc_length_inverse(&self, s: S, y_max: S) -> Result<S> {
        if s == S::zero() {
            return Ok(S::zero());
        }
        let target = s.abs();
        let m = self.modulus();
        let speed = |t: S| -> Result<S> { Ok((S::one() + (self.alpha * m.eval(t)?).powi(2)).sqrt()) };
        let mut hi = target.min(y_max);
        let mut lo = (target / speed(hi)?).min(hi);
        let stop = S::lit(1e-12).max(S::epsilon() * S::lit(16.0));
        let mut y = (lo + hi) * S::lit(0.5);
        for _ in 0..200 {
            let g = self.arc_length(y)?;
            if g < target {
                lo = y;
            } else {
                hi = y;
            }
            if hi - lo <= stop {
                break;
            }
            let step = y - (g - target) / speed(y)?;
            y = if step > lo && step < hi { step } else { (lo + hi) * S::lit(0.5) };
            if (step - y).abs() <= stop && (g - target).abs() <= stop {
                break;
            }
        }
        Ok(if s < S::zero() { -y } else { y })
    }

    /// Checks `|θ(s)| ≤ α·ω(|s|)` with `θ = θ̂∘G⁻¹` on `points` arc-length
    /// values spread over the whole lower boundary curve.
    pub fn tangent_angle_check(&self, points: usize) -> Result<AngleCheck<S>> {
        if points < 2 {
            return Err(Error::Argument("tangent-angle check needs at least two points".into()));
        }
        let y_max = self.tau * (S::one() - S::lit(1e-9));
        let g_max = self.arc_length(y_max)?.min(self.modulus().radius());
        let grid: Vec<S> = (0..points).map(|k| -g_max + (g_max + g_max) * S::of(k) / S::of(points - 1)).collect();
        let rows: Vec<Result<(S, Option<S>)>> = grid
            .par_iter()
            .map(|&s| {
                let y = self.arc_length_inverse(s, y_max)?;
                let theta = (self.alpha * self.h.derivative(y)?).atan();
                let bound = self.alpha * self.omega(s)?;
                if bound == S::zero() {
                    if theta != S::zero() {
                        return Err(Error::Range(format!("tangent angle {theta} at s = {s} where omega vanishes")));
                    }
                    Ok((s, None))
                } else {
                    Ok((s, Some(theta.abs() / bound)))
                }
            })
            .collect();
        let mut max_ratio = S::zero();
        let mut worst_s = S::zero();
        let mut skipped = 0;
        for row in rows {
            match row? {
                (_, None) => skipped += 1,
                (s, Some(r)) => {
                    if r > max_ratio {
                        max_ratio = r;
                        worst_s = s;
                    }
                }
            }
        }
        Ok(AngleCheck { max_ratio, worst_s, points, skipped })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleCheck<S> {
    pub max_ratio: S,
    pub worst_s: S,
    pub points: usize,
    /// Grid points where `ω(|s|) = 0` (only `s = 0`).
    pub skipped: usize,
}

impl<S: Scalar> AngleCheck<S> {
    pub fn passed(&self) -> bool {
        self.max_ratio <= S::one() + S::lit(1e-6)
    }
}

/// Parameters `(α, τ)` chosen for a convex domain, with the sampled
/// quantities they were derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterCertificate<S> {
    /// Deflated lower bound for `‖∇ρ‖` on `∂Ω`.
    pub m: S,
    /// Radius on which the sampled oscillation of `∇ρ` stays below `m/2`.
    pub delta0: S,
    pub alpha: S,
    pub tau: S,
    /// Radius of the h-transform (`0 < 2r ≤ ε₀`).
    pub r: S,
    pub boundary_samples: usize,
    pub pairs_per_radius: usize,
    /// Sampled oscillation at `δ₀`.
    pub oscillation: S,
}

impl<S: Scalar> ParameterCertificate<S> {
    /// Re-checks `2/α ≤ m/4`, `√2·τ < δ₀` and `x/h⁻¹(x) ≤ 1/α` on a grid.
    pub fn check(&self, modulus: &Modulus<S>) -> Result<()> {
        let slack = S::one() + S::lit(1e-12);
        if S::lit(2.0) / self.alpha > self.m / S::lit(4.0) * slack && self.alpha > S::one() {
            return Err(Error::CertificateFailure(format!("2/alpha = {} exceeds m/4 = {}", S::lit(2.0) / self.alpha, self.m / S::lit(4.0))));
        }
        if !(S::SQRT_2() * self.tau < self.delta0) {
            return Err(Error::CertificateFailure(format!("sqrt(2)·tau >= delta0 = {}", self.delta0)));
        }
        let h = HTransform::new(modulus.clone(), self.r)?;
        match ratio_violation(&h, self.alpha, self.tau) {
            None => Ok(()),
            Some(x) => Err(Error::CertificateFailure(format!("x/h^-1(x) > 1/alpha at x = {x}"))),
        }
    }
}

/// First grid point `x ∈ (0, τ)` with `x/h⁻¹(x) > 1/α`, if any.
fn ratio_violation<S: Scalar>(h: &HTransform<S>, alpha: S, tau: S) -> Option<S> {
    let sup = h.sup();
    let lo = S::lit(1e-12);
    let hi = S::one() - S::lit(2f64.powi(-10));
    (0..TAU_GRID).map(|k| tau * lo * (hi / lo).powf(S::of(k) / S::of(TAU_GRID - 1))).find(|&x| {
        if x >= sup {
            return true;
        }
        match h.inverse(x) {
            Ok(t) if t > S::zero() => x / t * alpha > S::one(),
            _ => true,
        }
    })
}

/// Chooses `(m, δ₀, α, τ)` for `(Ω, ω)`: `m` from `boundary_samples` boundary
/// points, `δ₀` from 10³ seeded point pairs per dyadic radius, `α = max(1, 8/m)`
/// and `τ` the largest dyadic value satisfying both τ-conditions.
pub fn select_parameters<S: Scalar>(
    domain: &ConvexDomain<S>,
    modulus: &Modulus<S>,
    r: S,
    boundary_samples: usize,
    seed: u64,
) -> Result<ParameterCertificate<S>> {
    let h = HTransform::new(modulus.clone(), r)?;
    if boundary_samples == 0 {
        return Err(Error::Argument("select_parameters needs boundary samples".into()));
    }
    let samples = domain.boundary_samples(boundary_samples)?;
    let min_grad = samples.iter().map(|b| b.gradient_norm).fold(S::infinity(), S::min);
    let m = min_grad * (S::one() - S::lit(GRADIENT_SAFETY));
    if !(m >= S::lit(1e-8)) {
        return Err(Error::DegenerateDefiningFunction(m.f64()));
    }

    let mut rng = sampling::rng(seed);
    let origin = vec![S::zero(); domain.real_dim()];
    let mut chosen = None;
    let mut delta = S::one();
    while delta >= r {
        delta = delta * S::lit(0.5);
    }
    for _ in 0..60 {
        let half = delta * S::lit(0.5);
        let mut osc = S::zero();
        for k in 0..PAIRS_PER_RADIUS {
            let xi = &samples[k % samples.len()].xi;
            let a = linalg::add(xi, &sampling::point_in_ball(&mut rng, &origin, half));
            let b = linalg::add(xi, &sampling::point_in_ball(&mut rng, &origin, half));
            osc = osc.max(linalg::dist(&domain.gradient(&a), &domain.gradient(&b)));
        }
        if osc <= m * S::lit(0.5) {
            chosen = Some((delta, osc));
            break;
        }
        delta = half;
    }
    let (delta0, oscillation) = chosen.ok_or_else(|| {
        Error::CertificateFailure("no dyadic radius keeps the oscillation of the gradient below m/2".into())
    })?;

    let alpha = (S::lit(8.0) / m).max(S::one());
    let mut tau = S::one();
    let mut found = None;
    for _ in 0..80 {
        if S::SQRT_2() * tau < delta0 && tau < h.half_width() && ratio_violation(&h, alpha, tau).is_none() {
            found = Some(tau);
            break;
        }
        tau = tau * S::lit(0.5);
    }
    let tau = found.ok_or_else(|| {
        Error::CertificateFailure(format!(
            "no dyadic tau satisfies sqrt(2)·tau < delta0 = {delta0} and x/h^-1(x) <= 1/alpha = {}",
            S::one() / alpha
        ))
    })?;
    Ok(ParameterCertificate {
        m,
        delta0,
        alpha,
        tau,
        r,
        boundary_samples: samples.len(),
        pairs_per_radius: PAIRS_PER_RADIUS,
        oscillation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport<S> {
    /// Largest `ρ(ξ + ζη)/s` over the grid.
    pub worst_margin: S,
    pub worst_zeta: (S, S),
    pub m: S,
    pub grid_sizes: (usize, usize),
}

impl<S: Scalar> EmbeddingReport<S> {
    /// `−m/4 + 0.05·m`.
    pub fn bound(&self) -> S {
        -self.m / S::lit(4.0) + S::lit(0.05) * self.m
    }

    pub fn satisfies_contract(&self) -> bool {
        self.worst_margin <= self.bound()
    }
}

/// Grid of `ζ = s + it` in the closure of `Ω_{α,τ}`: `s` geometric from
/// `τ·2⁻²⁰` to `τ·(1 − 2⁻¹⁰)`, `t` uniform on `[−t_bound(s), t_bound(s)]`.
pub fn embedding_grid<S: Scalar>(model: &ModelDomain<S>, ns: usize, nt: usize) -> Vec<(S, S)> {
    let tau = model.tau();
    let lo = S::lit(2f64.powi(-20));
    let hi = S::one() - S::lit(2f64.powi(-10));
    let mut grid = Vec::with_capacity(ns * nt);
    for i in 0..ns {
        let s = if ns == 1 { tau * hi } else { tau * lo * (hi / lo).powf(S::of(i) / S::of(ns - 1)) };
        let tb = model.t_bound(s);
        for j in 0..nt {
            let t = if nt == 1 { S::zero() } else { -tb + (tb + tb) * S::of(j) / S::of(nt - 1) };
            grid.push((s, t));
        }
    }
    grid
}

/// Evaluates `ρ(ξ + ζ·η)/s` over [`embedding_grid`].
pub fn verify_embedding<S: Scalar>(
    domain: &ConvexDomain<S>,
    bp: &BoundaryPoint<S>,
    model: &ModelDomain<S>,
    cert: &ParameterCertificate<S>,
    grid: (usize, usize),
) -> Result<EmbeddingReport<S>> {
    if grid.0 == 0 || grid.1 == 0 {
        return Err(Error::Argument("embedding grid must be non-empty".into()));
    }
    let zetas = embedding_grid(model, grid.0, grid.1);
    let values: Vec<S> = zetas
        .par_iter()
        .map(|&(s, t)| domain.rho(&linalg::add(&bp.xi, &linalg::complex_scale(&bp.normal, s, t))))
        .collect();
    let offending: Vec<(f64, f64)> = zetas
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v >= S::zero())
        .map(|((s, t), _)| (s.f64(), t.f64()))
        .collect();
    if !offending.is_empty() {
        return Err(Error::EmbeddingViolation { offending });
    }
    let mut worst = S::neg_infinity();
    let mut worst_zeta = (S::zero(), S::zero());
    for ((s, t), v) in zetas.iter().zip(&values) {
        let ratio = *v / *s;
        if ratio > worst {
            worst = ratio;
            worst_zeta = (*s, *t);
        }
    }
    Ok(EmbeddingReport { worst_margin: worst, worst_zeta, m: cert.m, grid_sizes: grid })
}
