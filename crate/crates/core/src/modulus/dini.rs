//! Dini integrals `∫₀^σ ω(t)/t dt`.
//!
//! With `t = e^{-u}` the integral becomes `∫_{log(1/σ)}^∞ ω(e^{-u}) du`, whose
//! integrand is smooth and non-increasing. The `u`-axis is cut into blocks
//! that are dyadic in `t` while `u < log 2` and double in length afterwards.
//! For `ω` decaying like `|log t|^{-1-ε}` consecutive doubling blocks shrink by
//! the constant ratio `2^{-ε}`, which gives both the tail extrapolation and
//! the divergence test.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::scalar::Scalar;

use super::Modulus;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiniOptions<S> {
    pub tol: S,
    /// Maximum bisection depth of the adaptive Simpson rule per block.
    pub max_depth: u32,
    pub max_blocks: usize,
    /// Consecutive non-shrinking doubling blocks required to declare divergence.
    pub divergence_run: usize,
    /// Divergence also requires the partial integral to exceed `factor · tol`.
    pub divergence_factor: S,
    /// Local Dini exponents below this value count as non-shrinking.
    pub min_exponent: S,
}

impl<S: Scalar> DiniOptions<S> {
    pub fn new(tol: S) -> Self {
        Self {
            tol,
            max_depth: 40,
            max_blocks: 64,
            divergence_run: 6,
            divergence_factor: S::lit(1e6),
            min_exponent: S::lit(0.02),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiniOutcome<S> {
    Finite { value: S, blocks: usize },
    Diverged { partial: S, blocks: usize },
}

impl<S: Scalar> DiniOutcome<S> {
    pub fn value(&self) -> Option<S> {
        match self {
            DiniOutcome::Finite { value, .. } => Some(*value),
            DiniOutcome::Diverged { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, DiniOutcome::Finite { .. })
    }
}

pub fn dini_integral<S: Scalar>(omega: &Modulus<S>, sigma: S, tol: S) -> Result<DiniOutcome<S>> {
    dini_integral_with(omega, sigma, &DiniOptions::new(tol))
}

pub fn dini_integral_with<S: Scalar>(
    omega: &Modulus<S>,
    sigma: S,
    opts: &DiniOptions<S>,
) -> Result<DiniOutcome<S>> {
    if !(sigma > S::zero() && sigma <= omega.radius()) {
        return Err(Error::Domain(format!("sigma = {sigma} outside (0, {}]", omega.radius())));
    }
    if !(opts.tol > S::zero()) {
        return Err(Error::Argument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    omega.validate()?;

    let ln2 = S::LN_2();
    let g = |u: S| omega.eval_log(u);
    let shrink_limit = S::lit(2.0).powf(-opts.min_exponent);
    let quarter = opts.tol * S::lit(0.25);

    let mut lo = -sigma.ln();
    let mut partial = S::zero();
    let mut prev_block: Option<S> = None;
    let mut prev_ratio: Option<S> = None;
    let mut prev_extrapolated: Option<S> = None;
    let mut run = 0usize;
    let mut prev_doubling = false;

    for k in 0..opts.max_blocks {
        let doubling = lo >= ln2;
        let hi = if doubling { lo + lo } else { lo + ln2 };
        let block_tol = quarter * S::lit(0.5).powi(k as i32 + 1);
        let block = adaptive_simpson(g, lo, hi, block_tol, opts.max_depth).value;
        partial = partial + block;
        let blocks = k + 1;
        if !block.is_finite() {
            return Ok(DiniOutcome::Diverged { partial, blocks });
        }
        if block == S::zero() {
            return Ok(DiniOutcome::Finite { value: partial, blocks });
        }
        let ratio = match prev_block {
            Some(pb) if doubling && prev_doubling && pb > S::zero() => Some(block / pb),
            _ => None,
        };
        if let Some(q) = ratio {
            if q >= shrink_limit {
                run += 1;
                if run >= opts.divergence_run && partial > opts.divergence_factor * opts.tol {
                    return Ok(DiniOutcome::Diverged { partial, blocks });
                }
            } else {
                run = 0;
                let tail = block * q / (S::one() - q);
                let extrapolated = partial + tail;
                if tail < quarter {
                    return Ok(DiniOutcome::Finite { value: extrapolated, blocks });
                }
                // geometric regime: the ratio has settled, so the extrapolated
                // tail is exact up to the block quadrature error
                if let (Some(pq), Some(pe)) = (prev_ratio, prev_extrapolated) {
                    if (q - pq).abs() <= S::lit(1e-6) * (S::one() - q)
                        && (extrapolated - pe).abs() <= quarter
                    {
                        return Ok(DiniOutcome::Finite { value: extrapolated, blocks });
                    }
                }
                prev_extrapolated = Some(extrapolated);
            }
            prev_ratio = Some(q);
        }
        prev_block = Some(block);
        prev_doubling = doubling;
        lo = hi;
    }
    Err(Error::ToleranceNotMet {
        what: format!("dini integral of {omega}"),
        lo: partial.f64(),
        hi: prev_extrapolated.map(|e| e.f64()).unwrap_or(f64::INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `ω(t) = 1/|log t|` sampled on the dyadic grid `t = 2^{-j}`, j ≤ 1000.
    fn boundary_case() -> Modulus<f64> {
        let mut nodes: Vec<(f64, f64)> =
            (1..=1000).map(|j| (2f64.powi(-j), 1.0 / (j as f64 * std::f64::consts::LN_2))).collect();
        nodes.reverse();
        Modulus::empirical(nodes).unwrap()
    }

    #[test]
    fn linear_modulus_unit_sigma() {
        let v = dini_integral(&Modulus::<f64>::linear(1.0).unwrap(), 1.0, 1e-9).unwrap();
        assert!((v.value().unwrap() - 1.0).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn log_family_closed_form() {
        // ∫₀^{1/2} dt/(t log²t) = 1/log 2
        let v = dini_integral(&Modulus::log_family(1.0).unwrap(), 0.5, 1e-8).unwrap();
        assert!((v.value().unwrap() - 1.0 / std::f64::consts::LN_2).abs() < 1e-7, "{v:?}");
    }

    #[test]
    fn log_family_general_eps() {
        // closed form (log 1/σ)^{-ε}/ε
        for eps in [0.1, 0.25, 0.5, 2.0] {
            let sigma = 0.3;
            let want = (1.0 / sigma as f64).ln().powf(-eps) / eps;
            let v = dini_integral(&Modulus::log_family(eps).unwrap(), sigma, 1e-6).unwrap();
            let got = v.value().unwrap_or_else(|| panic!("eps={eps} diverged"));
            assert!((got - want).abs() < 1e-5 * want.max(1.0), "eps={eps}: {got} vs {want}");
        }
    }

    #[test]
    fn sqrt_modulus() {
        let v = dini_integral(&Modulus::<f64>::hoelder(0.5, 1.0).unwrap(), 1.0, 1e-9).unwrap();
        assert!((v.value().unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn boundary_case_diverges() {
        let v = dini_integral(&boundary_case(), 0.5, 1e-6).unwrap();
        assert!(matches!(v, DiniOutcome::Diverged { .. }), "{v:?}");
    }

    #[test]
    fn boundary_case_partial_sums_grow() {
        // oracle: exact dyadic partial sums Σ_{j<k} ω(2^{-j-1})·log 2 grow without bound
        let m = boundary_case();
        let partial = |k: i32| -> f64 {
            (1..k).map(|j| m.eval(2f64.powi(-j - 1)).unwrap() * std::f64::consts::LN_2).sum()
        };
        assert!(partial(900) - partial(30) > 3.0);
    }

    #[test]
    fn domain_errors() {
        let m = Modulus::linear(1.0).unwrap();
        assert!(matches!(dini_integral(&m, 0.0, 1e-6), Err(Error::Domain(_))));
        assert!(matches!(dini_integral(&m, 1.5, 1e-6), Err(Error::Domain(_))));
        assert!(matches!(dini_integral(&m, 0.5, 0.0), Err(Error::Argument(_))));
    }

    #[test]
    fn single_precision_hoelder() {
        let v = dini_integral(&Modulus::<f32>::hoelder(0.5, 1.0).unwrap(), 1.0, 1e-4).unwrap();
        assert!((v.value().unwrap() - 2.0).abs() < 1e-3);
    }
}
