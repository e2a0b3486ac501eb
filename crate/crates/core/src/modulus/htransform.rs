use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::scalar::Scalar;

use super::{Modulus, ModulusKind};

/// `h(t) = ∫₀^{|t|} ω(y) dy` on `(−2r, 2r)`: even, convex, `h(0) = 0`,
/// `h'(0) = 0`, strictly increasing on `[0, 2r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HTransform<S> {
    modulus: Modulus<S>,
    r: S,
    /// `h(2r−)`, the supremum of the range.
    h_max: S,
}

impl<S: Scalar> HTransform<S> {
    pub fn new(modulus: Modulus<S>, r: S) -> Result<Self> {
        if !(r > S::zero()) || S::lit(2.0) * r > modulus.radius() {
            return Err(Error::Domain(format!(
                "h-transform needs 0 < 2r <= {}, got r = {r}",
                modulus.radius()
            )));
        }
        modulus.validate()?;
        let mut h = Self { modulus, r, h_max: S::zero() };
        h.h_max = h.integral(S::lit(2.0) * r);
        Ok(h)
    }

    pub fn modulus(&self) -> &Modulus<S> {
        &self.modulus
    }

    pub fn r(&self) -> S {
        self.r
    }

    /// Half-width `2r` of the open interval of definition.
    pub fn half_width(&self) -> S {
        S::lit(2.0) * self.r
    }

    pub fn sup(&self) -> S {
        self.h_max
    }

    pub fn eval(&self, t: S) -> Result<S> {
        if !(t.abs() < self.half_width()) {
            return Err(Error::Domain(format!("h evaluated at {t} outside (-{0}, {0})", self.half_width())));
        }
        Ok(self.integral(t.abs()))
    }

    /// `h'(t) = sign(t)·ω(|t|)`.
    pub fn derivative(&self, t: S) -> Result<S> {
        if !(t.abs() < self.half_width()) {
            return Err(Error::Domain(format!("h' evaluated at {t} outside (-{0}, {0})", self.half_width())));
        }
        let w = self.modulus.eval_unchecked(t.abs());
        Ok(if t < S::zero() { -w } else { w })
    }

    /// The unique `t ∈ [0, 2r)` with `h(t) = s`, by bisection to absolute
    /// tolerance 1e-12 (or the precision floor of the scalar type).
    pub fn inverse(&self, s: S) -> Result<S> {
        if !(s >= S::zero()) {
            return Err(Error::Range(format!("h^-1 needs s >= 0, got {s}")));
        }
        if s >= self.h_max {
            return Err(Error::Range(format!("h^-1({s}) beyond h(2r-) = {}", self.h_max)));
        }
        if s == S::zero() {
            return Ok(S::zero());
        }
        let tol = S::lit(1e-12).max(S::lit(4.0) * S::epsilon() * self.half_width());
        let (mut lo, mut hi) = (S::zero(), self.half_width());
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let mid = (lo + hi) * S::lit(0.5);
            if self.integral(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) * S::lit(0.5))
    }

    /// `∫₀^x ω` for `x ≥ 0`, with closed forms where available.
    pub(crate) fn integral(&self, x: S) -> S {
        if x <= S::zero() {
            return S::zero();
        }
        match self.modulus.kind() {
            ModulusKind::Hoelder { alpha, c } => {
                let p = *alpha + S::one();
                *c * x.powf(p) / p
            }
            ModulusKind::Linear { c } => *c * x * x * S::lit(0.5),
            ModulusKind::LogFamily { eps } => {
                // y = e^{-u}: ∫_{log(1/x)}^∞ e^{-u} u^{-(1+ε)} du = Γ(−ε, log(1/x))
                let l = -x.ln();
                upper_gamma(-*eps, l).unwrap_or_else(|| {
                    let f = |u: S| (-u).exp() * self.modulus.eval_log(u);
                    let tol = x * S::lit(1e-15).max(S::epsilon());
                    adaptive_simpson(f, l, l + S::lit(60.0), tol, 50).value
                })
            }
            ModulusKind::Empirical { nodes } => {
                let mut acc = S::zero();
                for w in nodes.windows(2) {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    if t0 >= x {
                        break;
                    }
                    let end = t1.min(x);
                    let v_end = v0 + (v1 - v0) * (end - t0) / (t1 - t0);
                    acc = acc + (v0 + v_end) * S::lit(0.5) * (end - t0);
                }
                let last = nodes[nodes.len() - 1];
                if x > last.0 {
                    acc = acc + last.1 * (x - last.0);
                }
                acc
            }
        }
    }
}

/// `Γ(a, x)` for `x > 0` by the Legendre continued fraction (modified Lentz);
/// `None` if it fails to settle.
fn upper_gamma<S: Scalar>(a: S, x: S) -> Option<S> {
    if !(x > S::zero()) {
        return None;
    }
    let tiny = S::min_positive_value() / S::epsilon();
    let two = S::lit(2.0);
    let mut b = x + S::one() - a;
    let mut c = S::one() / tiny;
    let mut d = S::one() / b;
    let mut h = d;
    for i in 1..=500 {
        let i = S::of(i);
        let an = -i * (i - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = S::one() / d;
        let step = d * c;
        h = h * step;
        if (step - S::one()).abs() <= S::epsilon() {
            return Some((a * x.ln() - x).exp() * h);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_examples() {
        let h = HTransform::new(Modulus::<f64>::linear(1.0).unwrap(), 0.5).unwrap();
        assert!((h.eval(0.2).unwrap() - 0.02).abs() < 1e-15);
        assert!((h.eval(-0.2).unwrap() - 0.02).abs() < 1e-15);
        assert!((h.inverse(0.02).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn log_family_bounds() {
        // 0 < h(t) <= t·ω(t) because ω is non-decreasing
        let f1 = Modulus::log_family(1.0).unwrap();
        let h = HTransform::new(f1.clone(), 0.25).unwrap();
        let v = h.eval(0.1).unwrap();
        assert!(v > 0.0 && v < 0.01886, "{v}");
        // independent check: Simpson directly on [0, 0.1] in t
        let direct = adaptive_simpson(|y: f64| f1.eval(y).unwrap(), 0.0, 0.1, 1e-13, 60).value;
        assert!((v - direct).abs() < 1e-9, "{v} vs {direct}");
    }

    #[test]
    fn log_family_gamma_matches_substituted_quadrature() {
        for eps in [0.1, 0.5, 1.0, 2.5] {
            let m = Modulus::<f64>::log_family(eps).unwrap();
            let h = HTransform::new(m.clone(), 0.25).unwrap();
            for x in [1e-9f64, 1e-4, 0.05, 0.2, 0.49] {
                let l = -x.ln();
                let q = adaptive_simpson(|u: f64| (-u).exp() * m.eval_log(u), l, l + 60.0, x * 1e-15, 50).value;
                assert!((h.integral(x) - q).abs() <= 1e-12 * q, "ε={eps} x={x}: {} vs {q}", h.integral(x));
            }
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for m in [Modulus::hoelder(0.5, 2.0).unwrap(), Modulus::linear(3.0).unwrap()] {
            let h = HTransform::new(m.clone(), 0.5).unwrap();
            let q = adaptive_simpson(|y: f64| m.eval(y).unwrap(), 0.0, 0.7, 1e-13, 50).value;
            assert!((h.eval(0.7).unwrap() - q).abs() < 1e-10);
        }
    }

    #[test]
    fn empirical_integral_is_exact() {
        let m = Modulus::<f64>::empirical(vec![(0.5, 0.5), (1.0, 0.75)]).unwrap();
        let h = HTransform::new(m, 0.5).unwrap();
        // ∫₀^0.5 t dt + ∫_{0.5}^{0.75} (0.5 + 0.5(t-0.5)) dt
        let want = 0.125 + 0.25 * 0.5 + 0.5 * 0.25 * 0.25 * 0.5;
        assert!((h.eval(0.75).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let m = Modulus::linear(1.0).unwrap();
        assert!(matches!(HTransform::new(m.clone(), 0.6), Err(Error::Domain(_))));
        let h = HTransform::new(m, 0.25).unwrap();
        assert!(matches!(h.eval(0.5), Err(Error::Domain(_))));
        assert!(matches!(h.inverse(0.2), Err(Error::Range(_))));
    }

    #[test]
    fn shape_properties() {
        let h = HTransform::new(Modulus::log_family(1.0).unwrap(), 0.25).unwrap();
        assert_eq!(h.eval(0.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for k in 1..200 {
            let t = 0.499 * k as f64 / 200.0;
            let v = h.eval(t).unwrap();
            assert!(v > prev);
            assert_eq!(v, h.eval(-t).unwrap());
            prev = v;
        }
        // h(t)/t -> 0
        let ratio = |t: f64| h.eval(t).unwrap() / t;
        assert!(ratio(1e-8) < ratio(1e-4) && ratio(1e-8) < 3e-3);
    }

    proptest::proptest! {
        #[test]
        fn inverse_round_trip(t in 0.0f64..0.499) {
            for m in [Modulus::linear(1.0).unwrap(), Modulus::hoelder(0.3, 1.0).unwrap(), Modulus::log_family(1.0).unwrap()] {
                let h = HTransform::new(m, 0.25).unwrap();
                let back = h.inverse(h.eval(t).unwrap()).unwrap();
                proptest::prop_assert!((back - t).abs() < 1e-10, "{} vs {}", back, t);
            }
        }
    }
}
