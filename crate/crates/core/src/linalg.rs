//! Vector helpers on ℂⁿ stored as interleaved real 2n-vectors
//! `(x₁, y₁, …, xₙ, yₙ)` with `z_j = x_j + i y_j`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<S: Scalar>(a: &[S]) -> S {
    // hypot-style accumulation keeps tiny offsets accurate
    let scale = a.iter().fold(S::zero(), |m, x| m.max(x.abs()));
    if scale == S::zero() {
        return S::zero();
    }
    let s: S = a.iter().map(|&x| (x / scale) * (x / scale)).sum();
    scale * s.sqrt()
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<S: Scalar>(a: &[S], k: S) -> Vec<S> {
    a.iter().map(|&x| x * k).collect()
}

/// `a + k·b`
pub fn axpy<S: Scalar>(a: &[S], k: S, b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x + k * y).collect()
}

pub fn dist<S: Scalar>(a: &[S], b: &[S]) -> S {
    norm(&sub(a, b))
}

pub fn normalize<S: Scalar>(a: &[S]) -> Option<Vec<S>> {
    let n = norm(a);
    if n > S::zero() && n.is_finite() {
        Some(scale(a, S::one() / n))
    } else {
        None
    }
}

/// Multiplication by `i` in real coordinates:
/// `(x₁, x₂, …, x₂ₙ₋₁, x₂ₙ) ↦ (−x₂, x₁, …, −x₂ₙ, x₂ₙ₋₁)`.
pub fn multiply_by_i<S: Scalar>(v: &[S]) -> Result<Vec<S>> {
    if v.len() % 2 != 0 {
        return Err(Error::Argument(format!(
            "multiply_by_i needs an even-length vector, got length {}",
            v.len()
        )));
    }
    Ok(mul_i(v))
}

/// Infallible variant for vectors already known to have even length.
pub(crate) fn mul_i<S: Scalar>(v: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(v.len());
    for pair in v.chunks_exact(2) {
        out.push(-pair[1]);
        out.push(pair[0]);
    }
    out
}

/// Complex scalar multiple `(s + it)·v`.
pub fn complex_scale<S: Scalar>(v: &[S], s: S, t: S) -> Vec<S> {
    let iv = mul_i(v);
    v.iter().zip(&iv).map(|(&a, &b)| s * a + t * b).collect()
}

/// Hermitian product `⟨a, b⟩ = Σ a_j · conj(b_j)`.
pub fn hermitian<S: Scalar>(a: &[S], b: &[S]) -> Complex<S> {
    to_complex(a)
        .into_iter()
        .zip(to_complex(b))
        .fold(Complex::new(S::zero(), S::zero()), |acc, (x, y)| acc + x * y.conj())
}

pub fn to_complex<S: Scalar>(v: &[S]) -> Vec<Complex<S>> {
    v.chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect()
}

pub fn from_complex<S: Scalar>(v: &[Complex<S>]) -> Vec<S> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Lexicographic comparison used for deterministic tie-breaking.
/// `1 − Σ kᵢ zᵢ²` with the sum carried in double length, so that the result
/// keeps full relative accuracy right up to the quadric.
pub(crate) fn quadric_gap<S: Scalar>(z: &[S], weight: impl Fn(usize) -> S) -> S {
    let (mut hi, mut lo) = (S::zero(), S::zero());
    for (i, &x) in z.iter().enumerate() {
        let k = weight(i);
        let sq = x * x;
        let sq_err = x.mul_add(x, -sq);
        let t = k * sq;
        let t_err = k.mul_add(sq, -t) + k * sq_err;
        // two-sum
        let s = hi + t;
        let bb = s - hi;
        lo = lo + ((hi - (s - bb)) + (t - bb)) + t_err;
        hi = s;
    }
    (S::one() - hi) - lo
}

pub(crate) fn lex_less<S: Scalar>(a: &[S], b: &[S]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn multiply_by_i_examples() {
        assert_eq!(multiply_by_i(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        let v = [3.0, 4.0];
        let iv = multiply_by_i(&v).unwrap();
        assert_eq!(iv, vec![-4.0, 3.0]);
        assert_eq!(dot(&iv, &v), 0.0);
    }

    #[test]
    fn multiply_by_i_rejects_odd_length() {
        assert!(matches!(multiply_by_i(&[1.0, 2.0, 3.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn complex_scale_matches_complex_arithmetic() {
        let v = [0.3f64, -0.7, 1.1, 0.2];
        let got = complex_scale(&v, 0.5, -2.0);
        let z = Complex::new(0.5, -2.0);
        let want = from_complex(&to_complex(&v).iter().map(|w| z * w).collect::<Vec<_>>());
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn i_squared_is_minus_identity(v in prop::collection::vec(-10.0f64..10.0, 1..6)) {
            let mut v = v;
            if v.len() % 2 == 1 { v.push(0.5); }
            let iiv = multiply_by_i(&multiply_by_i(&v).unwrap()).unwrap();
            for (a, b) in iiv.iter().zip(&v) {
                prop_assert_eq!(*a, -*b);
            }
            prop_assert!(dot(&multiply_by_i(&v).unwrap(), &v).abs() < 1e-12);
        }
    }
}
