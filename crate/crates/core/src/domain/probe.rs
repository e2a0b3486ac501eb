use super::{BoundaryPoint, ComplexHyperplane, ConvexDomain};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sampling;
use crate::scalar::Scalar;

/// Sampled ℂ-strict convexity margins: for each radius `d`, the least
/// first-order distance to `Ω̄` of points of `ξ + T^ℂ_ξ` at distance `d` from `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CStrictProbe<S> {
    pub rows: Vec<(S, S)>,
    pub note: Option<String>,
}

impl<S> CStrictProbe<S> {
    /// All margins strictly positive (and at least one row).
    pub fn strict(&self) -> bool
    where
        S: Scalar,
    {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.1 > S::zero())
    }
}

impl<S: Scalar> ConvexDomain<S> {
    pub fn c_strict_probe(&self, bp: &BoundaryPoint<S>, radii: &[S], samples: usize) -> Result<CStrictProbe<S>> {
        let h = self.complex_tangent_hyperplane(bp)?;
        self.c_strict_probe_hyperplane(&h, radii, samples)
    }

    /// Same probe against an explicitly supplied complex hyperplane.
    pub fn c_strict_probe_hyperplane(
        &self,
        h: &ComplexHyperplane<S>,
        radii: &[S],
        samples: usize,
    ) -> Result<CStrictProbe<S>> {
        self.check_dim(&h.point)?;
        if self.dim() == 1 {
            return Ok(CStrictProbe {
                rows: Vec::new(),
                note: Some("dimension 1: the complex tangent hyperplane is a point".into()),
            });
        }
        let limit = S::lit(2.0) * self.bounding_radius();
        if let Some(d) = radii.iter().find(|d| !(**d > S::zero() && **d <= limit)) {
            return Err(Error::Argument(format!("probe radius {d} outside (0, {limit}]")));
        }
        if samples == 0 {
            return Err(Error::Argument("probe needs at least one sample per radius".into()));
        }
        let basis = h.real_basis();
        let coords: Vec<Vec<S>> = sampling::direction_set(basis.len(), samples.max(2 * basis.len()));
        let rows = radii
            .iter()
            .map(|&d| {
                let margin = coords
                    .iter()
                    .map(|c| {
                        let mut p = h.point.clone();
                        for (ck, bk) in c.iter().zip(&basis) {
                            p = linalg::axpy(&p, d * *ck, bk);
                        }
                        let rho = self.rho(&p);
                        if rho <= S::zero() {
                            S::zero()
                        } else {
                            rho / linalg::norm(&self.gradient(&p)).max(S::epsilon())
                        }
                    })
                    .fold(S::infinity(), S::min);
                (d, margin)
            })
            .collect();
        Ok(CStrictProbe { rows, note: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_margin() {
        let d = ConvexDomain::<f64>::ball(2).unwrap();
        let bp = d.boundary_point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let p = d.c_strict_probe(&bp, &[0.2, 0.05, 0.01], 32).unwrap();
        assert!(p.strict());
        for (r, m) in &p.rows {
            assert!((m - ((1.0 + r * r).sqrt() - 1.0)).abs() < 1e-12, "{r}: {m}");
        }
        // margins shrink with d
        assert!(p.rows[0].1 > p.rows[1].1 && p.rows[1].1 > p.rows[2].1);
    }

    #[test]
    fn polydisc_flat_direction() {
        let d = ConvexDomain::<f64>::polydisc(2).unwrap();
        let h = ComplexHyperplane {
            point: vec![1.0, 0.0, 0.0, 0.0],
            normal: vec![-1.0, 0.0, 0.0, 0.0],
            directions: vec![vec![0.0, 0.0, 1.0, 0.0]],
        };
        let p = d.c_strict_probe_hyperplane(&h, &[0.1, 0.5, 0.9], 32).unwrap();
        assert!(!p.strict());
        assert!(p.rows.iter().all(|r| r.1 == 0.0));
    }

    #[test]
    fn disc_is_vacuous() {
        let d = ConvexDomain::<f64>::disc();
        let bp = d.boundary_point(&[1.0, 0.0]).unwrap();
        let p = d.c_strict_probe(&bp, &[0.1], 8).unwrap();
        assert!(p.rows.is_empty() && p.note.is_some());
    }
}
