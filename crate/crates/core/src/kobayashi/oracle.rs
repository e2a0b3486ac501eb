//! Closed-form Kobayashi distances on the disc and the ball, and their
//! automorphisms.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Domains with a closed-form Kobayashi distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleDomain {
    /// The unit disc 𝔻 ⊂ ℂ.
    Disc,
    /// The unit ball Bⁿ ⊂ ℂⁿ, any `n`.
    Ball,
}

impl OracleDomain {
    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "disc" => Ok(Self::Disc),
            "ball" => Ok(Self::Ball),
            other => Err(Error::Parse(format!("unknown oracle domain `{other}`"))),
        }
    }
}

fn check_unit<S: Scalar>(p: &[S]) -> Result<()> {
    if !(linalg::norm(p) < S::one()) {
        return Err(Error::Domain(format!("{p:?} is not inside the unit ball")));
    }
    Ok(())
}

/// Exact Kobayashi distance: on 𝔻 `atanh|(p−q)/(1−q̄p)|`, on Bⁿ
/// `atanh‖φ_q(p)‖` with `φ_q` the involutive automorphism swapping `q` and 0.
pub fn exact_oracle<S: Scalar>(tag: OracleDomain, p: &[S], q: &[S]) -> Result<S> {
    if p.len() != q.len() || p.is_empty() || p.len() % 2 != 0 {
        return Err(Error::Argument(format!("points of lengths {} and {} do not match", p.len(), q.len())));
    }
    if tag == OracleDomain::Disc && p.len() != 2 {
        return Err(Error::Argument(format!("disc oracle needs points in ℂ, got {} real coordinates", p.len())));
    }
    check_unit(p)?;
    check_unit(q)?;
    let x = match tag {
        OracleDomain::Disc => {
            let (a, b) = (Complex::new(p[0], p[1]), Complex::new(q[0], q[1]));
            ((a - b) / (Complex::new(S::one(), S::zero()) - b.conj() * a)).norm()
        }
        OracleDomain::Ball => linalg::norm(&ball_automorphism(q, p)?),
    };
    Ok(x.min(S::one()).atanh())
}

/// `φ_a(z) = (a − P_a z − s_a Q_a z)/(1 − ⟨z, a⟩)` with `s_a = √(1 − |a|²)`,
/// `P_a` the orthogonal projection onto `ℂa` and `Q_a = I − P_a`.
pub fn ball_automorphism<S: Scalar>(a: &[S], z: &[S]) -> Result<Vec<S>> {
    if a.len() != z.len() || a.len() % 2 != 0 {
        return Err(Error::Argument("automorphism centre and point differ in dimension".into()));
    }
    check_unit(a)?;
    let na2 = linalg::dot(a, a);
    let s = (S::one() - na2).sqrt();
    let za = linalg::hermitian(z, a);
    let pz = if na2 > S::zero() {
        let c = za / na2;
        linalg::complex_scale(a, c.re, c.im)
    } else {
        vec![S::zero(); z.len()]
    };
    let qz = linalg::sub(z, &pz);
    let num = linalg::sub(&linalg::sub(a, &pz), &linalg::scale(&qz, s));
    let den = Complex::new(S::one(), S::zero()) - za;
    let inv = den.inv();
    Ok(linalg::complex_scale(&num, inv.re, inv.im))
}

/// `e^{iθ}(z − a)/(1 − āz)` on 𝔻.
pub fn disc_automorphism<S: Scalar>(a: Complex<S>, theta: S, z: Complex<S>) -> Complex<S> {
    let one = Complex::new(S::one(), S::zero());
    Complex::from_polar(S::one(), theta) * (z - a) / (one - a.conj() * z)
}

/// Distance in the ball `B(center, radius)`.
pub fn ball_distance<S: Scalar>(center: &[S], radius: S, p: &[S], q: &[S]) -> S {
    let k = S::one() / (radius * radius);
    quadric_distance(center, |_| k, p, q)
}

/// Distance in `{Σ kⱼ|zⱼ − cⱼ|² < 1}`, where `kᵢ` is indexed by real coordinate.
/// Complex lines are totally geodesic here, so this is the disc distance of the
/// slice through `p` and `q`, written through `u = ρ(p)`, `v = ρ(q)` and the line
/// invariant `M = A·u + |β|²` to avoid cancelling near the boundary.
pub(crate) fn quadric_distance<S: Scalar>(center: &[S], weight: impl Fn(usize) -> S + Copy, p: &[S], q: &[S]) -> S {
    let p = linalg::sub(p, center);
    let q = linalg::sub(q, center);
    let w = linalg::sub(&q, &p);
    let d2 = linalg::dot(&w, &w);
    if d2 == S::zero() {
        return S::zero();
    }
    let u = linalg::quadric_gap(&p, weight).max(S::zero());
    let v = linalg::quadric_gap(&q, weight).max(S::zero());
    let (mut a, mut beta) = (S::zero(), Complex::new(S::zero(), S::zero()));
    for j in 0..p.len() / 2 {
        let k = weight(2 * j);
        let wj = Complex::new(w[2 * j], w[2 * j + 1]);
        a = a + k * wj.norm_sqr();
        beta = beta + wj * Complex::new(p[2 * j], -p[2 * j + 1]) * k;
    }
    // a and β carry ‖w‖², ‖w‖ respectively; d²M = d²(A u + |β|²) for unit w
    let d2m = a * u + beta.norm_sqr();
    let uv = u * v;
    let x2 = d2m / (uv + d2m);
    if x2 < S::lit(0.25) {
        x2.sqrt().atanh()
    } else if uv == S::zero() {
        S::infinity()
    } else {
        (S::one() + x2.sqrt()).ln() + S::lit(0.5) * (d2m / uv).ln_1p()
    }
}

/// Kobayashi metric of the unit ball: `√(|v|²(1−|p|²) + |⟨v,p⟩|²)/(1−|p|²)`.
pub fn ball_metric<S: Scalar>(p: &[S], v: &[S]) -> S {
    let d = S::one() - linalg::dot(p, p);
    (linalg::dot(v, v) * d + linalg::hermitian(v, p).norm_sqr()).sqrt() / d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deep_close_points_keep_precision() {
        // 1 − a and 1 − b are exact, so the radial distance is known to the last bit
        let (a, b) = (1.0 - 2f64.powi(-40), 1.0 - 2f64.powi(-41));
        let want = 0.5 * (2.0 * (1.0 + b) / (1.0 + a)).ln();
        let got = ball_distance::<f64>(&[0.0; 4], 1.0, &[a, 0.0, 0.0, 0.0], &[b, 0.0, 0.0, 0.0]);
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn examples() {
        assert_eq!(exact_oracle::<f64>(OracleDomain::Disc, &[0.3, 0.0], &[0.3, 0.0]).unwrap(), 0.0);
        let v = exact_oracle::<f64>(OracleDomain::Disc, &[0.0, 0.0], &[0.5, 0.0]).unwrap();
        assert!((v - 0.5 * 3f64.ln()).abs() < 1e-15);
        let b = exact_oracle::<f64>(OracleDomain::Ball, &[0.0; 4], &[0.9, 0.0, 0.0, 0.0]).unwrap();
        assert!((b - 1.472219489583220).abs() < 1e-12);
        assert!(matches!(exact_oracle::<f64>(OracleDomain::Disc, &[0.0; 4], &[0.0; 4]), Err(Error::Argument(_))));
        assert!(matches!(exact_oracle::<f64>(OracleDomain::Ball, &[0.0; 4], &[0.0; 2]), Err(Error::Argument(_))));
        assert!(matches!(exact_oracle::<f64>(OracleDomain::Disc, &[1.0, 0.0], &[0.0; 2]), Err(Error::Domain(_))));
    }

    #[test]
    fn automorphism_is_involution_swapping_a_and_zero() {
        let a = [0.3, -0.1, 0.2, 0.4];
        let z = [-0.2, 0.5, 0.1, -0.3];
        let back = ball_automorphism(&a, &ball_automorphism(&a, &z).unwrap()).unwrap();
        assert!(linalg::dist(&back, &z) < 1e-14);
        assert!(linalg::dist(&ball_automorphism(&a, &[0.0; 4]).unwrap(), &a) < 1e-15);
        assert!(linalg::norm(&ball_automorphism(&a, &a).unwrap()) < 1e-15);
    }

    #[test]
    fn two_routes_agree() {
        let p = [0.3, -0.1, 0.2, 0.4];
        let q = [-0.2, 0.5, 0.1, -0.3];
        let a = exact_oracle::<f64>(OracleDomain::Ball, &p, &q).unwrap();
        let b = ball_distance::<f64>(&[0.0; 4], 1.0, &p, &q);
        assert!((a - b).abs() < 1e-13);
        // disc is the one-dimensional ball
        let d1 = exact_oracle::<f64>(OracleDomain::Disc, &[0.2, 0.7], &[-0.5, 0.1]).unwrap();
        let d2 = exact_oracle::<f64>(OracleDomain::Ball, &[0.2, 0.7], &[-0.5, 0.1]).unwrap();
        assert!((d1 - d2).abs() < 1e-13);
    }

    #[test]
    fn ball_metric_at_center_and_disc() {
        assert!((ball_metric::<f64>(&[0.0; 4], &[0.0, 0.0, 3.0, 4.0]) - 5.0).abs() < 1e-15);
        assert!((ball_metric::<f64>(&[0.5, 0.0], &[1.0, 0.0]) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn disc_automorphism_preserves_distance() {
        let a = Complex::new(0.4f64, -0.2);
        let (z, w) = (Complex::new(0.1, 0.6), Complex::new(-0.7, 0.0));
        let (fz, fw) = (disc_automorphism(a, 0.7, z), disc_automorphism(a, 0.7, w));
        let d0 = exact_oracle::<f64>(OracleDomain::Disc, &[z.re, z.im], &[w.re, w.im]).unwrap();
        let d1 = exact_oracle::<f64>(OracleDomain::Disc, &[fz.re, fz.im], &[fw.re, fw.im]).unwrap();
        assert!((d0 - d1).abs() < 1e-13);
    }
}
