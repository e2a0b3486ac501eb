use num_complex::Complex;
use rayon::prelude::*;

use super::SequenceSpec;
use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::kobayashi::{ball_automorphism, disc_automorphism, DistanceEngine};
use crate::linalg;
use crate::scalar::Scalar;

/// Known Kobayashi isometries (or isometric embeddings).
#[derive(Debug, Clone, PartialEq)]
pub enum Isometry<S> {
    Identity,
    /// `z ↦ e^{iθ}(z − a)/(1 − āz)` on 𝔻.
    DiscAutomorphism { a: Complex<S>, theta: S },
    /// The involution of Bⁿ swapping `a` and 0.
    BallAutomorphism { a: Vec<S> },
    /// `z ↦ (z, 0, …, 0)` from 𝔻 into Bⁿ.
    DiscIntoBall { n: usize },
}

impl<S: Scalar> Isometry<S> {
    /// Source and target domains; `Identity` acts on `domain`.
    pub fn domains(&self, domain: &ConvexDomain<S>) -> Result<(ConvexDomain<S>, ConvexDomain<S>)> {
        match self {
            Self::Identity => Ok((domain.clone(), domain.clone())),
            Self::DiscAutomorphism { .. } => Ok((ConvexDomain::disc(), ConvexDomain::disc())),
            Self::BallAutomorphism { a } => {
                let b = ConvexDomain::ball(a.len() / 2)?;
                Ok((b.clone(), b))
            }
            Self::DiscIntoBall { n } => Ok((ConvexDomain::disc(), ConvexDomain::ball(*n)?)),
        }
    }

    pub fn apply(&self, z: &[S]) -> Result<Vec<S>> {
        match self {
            Self::Identity => Ok(z.to_vec()),
            Self::DiscAutomorphism { a, theta } => {
                if z.len() != 2 {
                    return Err(Error::Map("disc automorphism acts on ℂ".into()));
                }
                let w = disc_automorphism(*a, *theta, Complex::new(z[0], z[1]));
                Ok(vec![w.re, w.im])
            }
            Self::BallAutomorphism { a } => ball_automorphism(a, z).map_err(|e| Error::Map(e.to_string())),
            Self::DiscIntoBall { n } => {
                if z.len() != 2 {
                    return Err(Error::Map("disc embedding acts on ℂ".into()));
                }
                let mut w = vec![S::zero(); 2 * n];
                w[0] = z[0];
                w[1] = z[1];
                Ok(w)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport<S> {
    pub images: Vec<Vec<S>>,
    /// `tail_diameters[k]` is the Euclidean diameter of `{F(p_ν) : ν > k}`.
    pub tail_diameters: Vec<S>,
    /// Last image, the candidate limit `F̃(ξ)`.
    pub limit: Vec<S>,
    /// `max |k₂ − k₁|` over the sampled pairs, endpoint by endpoint.
    pub isometry_defect: S,
    /// Widest of the brackets compared.
    pub bracket_width: S,
    /// Every sampled pair has its two brackets differing by no more than
    /// their widths plus rounding.
    pub isometry_consistent: bool,
}

/// Image cluster profile of `F(p_ν)` for a sequence `p_ν → ξ` of length
/// `depth + 8`, together with an isometry sanity check on consecutive pairs
/// and pairs with the first point.
pub fn boundary_limit_probe<S: Scalar, F>(
    source: &DistanceEngine<S>,
    target: &DistanceEngine<S>,
    map: F,
    xi: &[S],
    depth: usize,
    scale: S,
) -> Result<ExtensionReport<S>>
where
    F: Fn(&[S]) -> Result<Vec<S>> + Sync,
{
    let spec = SequenceSpec::NormalRay { depth: depth + 8, scale };
    let points = spec.realize(source.domain(), xi)?;
    let images: Vec<Vec<S>> = points
        .iter()
        .map(|p| {
            let w = map(p)?;
            if !target.domain().contains(&w) {
                return Err(Error::Map(format!("image {w:?} of {p:?} is not inside {}", target.domain().tag())));
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    let tail_diameters: Vec<S> = (0..images.len())
        .map(|k| {
            let tail = &images[k..];
            let mut d = S::zero();
            for (i, a) in tail.iter().enumerate() {
                for b in &tail[i + 1..] {
                    d = d.max(linalg::dist(a, b));
                }
            }
            d
        })
        .collect();

    let n = points.len();
    let pairs: Vec<(usize, usize)> = (0..n - 1).map(|k| (k, k + 1)).chain((2..n).map(|k| (0, k))).collect();
    let checks: Vec<(S, S, bool)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let a = source.distance_bracket(&points[i], &points[j])?;
            let b = target.distance_bracket(&images[i], &images[j])?;
            let gap = (a.lo - b.lo).abs().max((a.hi - b.hi).abs());
            let width = a.width().max(b.width());
            let slack = S::lit(1e-8) * (S::one() + a.hi.max(b.hi));
            Ok((gap, width, gap <= width + slack))
        })
        .collect::<Result<_>>()?;
    let isometry_defect = checks.iter().map(|c| c.0).fold(S::zero(), S::max);
    let bracket_width = checks.iter().map(|c| c.1).fold(S::zero(), S::max);
    let isometry_consistent = checks.iter().all(|c| c.2);
    Ok(ExtensionReport {
        limit: images[images.len() - 1].clone(),
        images,
        tail_diameters,
        isometry_defect,
        bracket_width,
        isometry_consistent,
    })
}
