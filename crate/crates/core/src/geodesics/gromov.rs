use rayon::prelude::*;

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::kobayashi::{DistanceBracket, DistanceEngine, GromovBracket, PreparedPoint};
use crate::linalg;
use crate::scalar::Scalar;

/// How a sequence tending to a boundary point is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSpec<S> {
    /// `ξ + scale·2^{−ν} η` for `ν = 1..=depth`.
    NormalRay { depth: usize, scale: S },
    /// Explicit points, which must approach `ξ`.
    Points(Vec<Vec<S>>),
}

impl<S: Scalar> SequenceSpec<S> {
    pub fn realize(&self, domain: &ConvexDomain<S>, xi: &[S]) -> Result<Vec<Vec<S>>> {
        let points = match self {
            Self::NormalRay { depth, scale } => {
                if *depth == 0 || !(*scale > S::zero()) {
                    return Err(Error::Sequence("normal-ray sequence needs depth ≥ 1 and scale > 0".into()));
                }
                let bp = domain.boundary_point(xi)?;
                (1..=*depth)
                    .map(|nu| linalg::axpy(xi, *scale * S::lit(0.5).powi(nu as i32), &bp.normal))
                    .collect::<Vec<_>>()
            }
            Self::Points(points) => {
                domain.check_dim(xi)?;
                points.clone()
            }
        };
        if points.len() < 2 {
            return Err(Error::Sequence("a sequence needs at least two points".into()));
        }
        for p in &points {
            domain.check_dim(p)?;
            if !domain.contains(p) {
                return Err(Error::Sequence(format!("sequence point {p:?} is not inside {}", domain.tag())));
            }
        }
        let first = linalg::dist(&points[0], xi);
        let last = linalg::dist(&points[points.len() - 1], xi);
        let r = domain.bounding_radius();
        if !(last < S::lit(0.25) * first && last < S::lit(0.05) * r) {
            return Err(Error::Sequence(format!(
                "sequence does not approach {xi:?}: distance goes from {first} to {last}"
            )));
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Diverging,
    Bounded,
    Unclassified,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Diverging => "diverging",
            Self::Bounded => "bounded",
            Self::Unclassified => "unclassified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GromovSettings<S> {
    /// Thresholds the diagonal lower brackets must cross and stay above.
    pub ladder: Vec<S>,
    /// Multiplier on the largest upper bracket of the leading quarter block.
    pub cap_factor: S,
    /// Least admissible cap.
    pub cap_floor: S,
}

impl<S: Scalar> Default for GromovSettings<S> {
    fn default() -> Self {
        Self {
            ladder: vec![S::lit(1.0), S::lit(2.0), S::lit(3.0), S::lit(4.0)],
            cap_factor: S::lit(1.5),
            cap_floor: S::lit(0.25),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GromovExperiment<S> {
    /// `matrix[ν][μ]` brackets `(p_ν | q_μ)_o`.
    pub matrix: Vec<Vec<GromovBracket<S>>>,
    pub classification: Classification,
    pub cap: S,
    /// Same experiment about the second base point.
    pub second_base: Vec<S>,
    pub second_classification: Classification,
    /// Every pair of products differs by at most `k(o, o′)` at bracket level.
    pub base_consistent: bool,
}

fn products<S: Scalar>(
    engine: &DistanceEngine<S>,
    p: &[PreparedPoint<S>],
    q: &[PreparedPoint<S>],
    pq: &[Vec<DistanceBracket<S>>],
    o: &[S],
) -> Result<Vec<Vec<GromovBracket<S>>>> {
    let o = engine.prepare(o)?;
    let to_o = |x: &PreparedPoint<S>| engine.bracket_prepared(x, &o, &[]);
    let po: Vec<DistanceBracket<S>> = p.par_iter().map(to_o).collect::<Result<_>>()?;
    let qo: Vec<DistanceBracket<S>> = q.par_iter().map(to_o).collect::<Result<_>>()?;
    let half = S::lit(0.5);
    Ok(pq
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, xy)| {
                    let lo = ((po[i].lo + qo[j].lo - xy.hi) * half).max(S::zero());
                    let hi = ((po[i].hi + qo[j].hi - xy.lo) * half).max(lo);
                    GromovBracket { lo, hi }
                })
                .collect()
        })
        .collect())
}

fn classify<S: Scalar>(matrix: &[Vec<GromovBracket<S>>], settings: &GromovSettings<S>) -> (Classification, S) {
    let n = matrix.len().min(matrix.first().map_or(0, Vec::len));
    let diagonal: Vec<S> = (0..n).map(|k| matrix[k][k].lo).collect();
    let diverging = !settings.ladder.is_empty()
        && settings.ladder.iter().all(|&level| match diagonal.iter().position(|&v| v >= level) {
            Some(first) => diagonal[first..].iter().all(|&v| v >= level),
            None => false,
        });
    let quarter = matrix.len().div_ceil(4).max(1);
    let lead = matrix
        .iter()
        .take(quarter)
        .flat_map(|row| row.iter().take(quarter))
        .map(|g| g.hi)
        .fold(S::zero(), S::max);
    let cap = (settings.cap_factor * lead).max(settings.cap_floor);
    let bounded = matrix.iter().flatten().all(|g| g.hi <= cap);
    let class = match (diverging, bounded) {
        (true, false) => Classification::Diverging,
        (false, true) => Classification::Bounded,
        _ => Classification::Unclassified,
    };
    (class, cap)
}

/// A second base point a tenth of the bounding radius away from `o`.
fn shifted_base<S: Scalar>(domain: &ConvexDomain<S>, o: &[S]) -> Result<Vec<S>> {
    let mut step = S::lit(0.1) * domain.bounding_radius();
    let mut dir = vec![S::zero(); o.len()];
    dir[1] = S::one();
    for _ in 0..40 {
        let o2 = linalg::axpy(o, step, &dir);
        if domain.contains(&o2) {
            return Ok(o2);
        }
        step = step * S::lit(0.5);
    }
    Err(Error::Domain(format!("no second base point near {o:?}")))
}

/// Matrix of Gromov products `(p_ν | q_μ)_o` for sequences tending to `ξ`
/// and `ξ′`, classified by the diagonal ladder and the cap rule, and rerun
/// about a second base point.
pub fn gromov_boundary_experiment<S: Scalar>(
    engine: &DistanceEngine<S>,
    xi: &[S],
    xi2: &[S],
    p_spec: &SequenceSpec<S>,
    q_spec: &SequenceSpec<S>,
    o: &[S],
    settings: &GromovSettings<S>,
) -> Result<GromovExperiment<S>> {
    let domain = engine.domain();
    domain.require_interior(o)?;
    let prepare = |pts: Vec<Vec<S>>| -> Result<Vec<PreparedPoint<S>>> {
        pts.par_iter().map(|z| engine.prepare(z)).collect()
    };
    let p = prepare(p_spec.realize(domain, xi)?)?;
    let q = prepare(q_spec.realize(domain, xi2)?)?;
    let pq: Vec<Vec<DistanceBracket<S>>> = p
        .par_iter()
        .map(|x| q.iter().map(|y| engine.bracket_prepared(x, y, &[])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let first = products(engine, &p, &q, &pq, o)?;
    let (classification, cap) = classify(&first, settings);

    let o2 = shifted_base(domain, o)?;
    let second = products(engine, &p, &q, &pq, &o2)?;
    let (second_classification, _) = classify(&second, settings);
    let shift = engine.distance_bracket(o, &o2)?.hi;
    let base_consistent = first
        .iter()
        .flatten()
        .zip(second.iter().flatten())
        .all(|(a, b)| a.lo <= b.hi + shift && b.lo <= a.hi + shift);
    Ok(GromovExperiment {
        matrix: first,
        classification,
        cap,
        second_base: o2,
        second_classification,
        base_consistent,
    })
}
