use super::{BoundaryPoint, ConvexDomain};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sampling;
use crate::scalar::Scalar;

/// Multi-start ray directions for the projection search.
const STARTS: usize = 64;
/// Accepted angle between the projection direction and the outward normal.
const ALIGNMENT_LIMIT: f64 = 1e-4;
const MAX_STEPS: usize = 400;

impl<S: Scalar> ConvexDomain<S> {
    /// Nearest boundary point to the interior point `z` and `δ_Ω(z)`.
    ///
    /// Starts from the shortest of 64 ray casts (ties broken by the
    /// lexicographically smallest direction) and then turns the ray towards
    /// the outward normal at its exit point until the two align.
    pub fn boundary_project(&self, z: &[S], tol: S) -> Result<(BoundaryPoint<S>, S)> {
        self.require_interior(z)?;
        let dim = self.real_dim();
        let dirs: Vec<Vec<S>> = sampling::direction_set(dim, STARTS);
        let hits: Vec<S> = dirs.iter().map(|d| self.ray_exit(z, d).mid()).collect();
        let best = hits.iter().copied().fold(S::infinity(), S::min);
        let tie = S::lit(1e-9) * self.bounding_radius();
        let mut start: Option<usize> = None;
        for (k, t) in hits.iter().enumerate() {
            if *t - best <= tie && start.map_or(true, |s| linalg::lex_less(&dirs[k], &dirs[s])) {
                start = Some(k);
            }
        }
        let mut d = dirs[start.expect("non-empty direction set")].clone();
        let mut t = hits[start.expect("non-empty direction set")];

        let mut step = S::one();
        let mut angle = S::infinity();
        for _ in 0..MAX_STEPS {
            let xi = linalg::axpy(z, t, &d);
            let nu = match linalg::normalize(&self.gradient(&xi)) {
                Some(nu) => nu,
                None => break,
            };
            angle = linalg::dot(&d, &nu).max(-S::one()).min(S::one()).acos();
            if angle < S::lit(1e-9) || step < S::lit(1e-14) {
                break;
            }
            let trial = match linalg::normalize(&linalg::axpy(&d, step, &linalg::sub(&nu, &d))) {
                Some(v) => v,
                None => break,
            };
            let tt = self.ray_exit(z, &trial).mid();
            if tt < t {
                d = trial;
                t = tt;
                step = (step + step).min(S::one());
            } else {
                step = step * S::lit(0.5);
            }
        }
        if !(angle < S::lit(ALIGNMENT_LIMIT)) {
            // the shortest ray found so far bounds δ from above only
            return Err(Error::ToleranceNotMet { what: "boundary projection".into(), lo: 0.0, hi: t.f64() });
        }
        let xi = linalg::axpy(z, t, &d);
        let bp = self.boundary_point_aligned(&xi, angle)?;
        // δ ≤ t always; the first-order gap t − t·cos θ bounds the error
        let slack = t * (S::one() - angle.cos());
        if slack > tol {
            return Err(Error::ToleranceNotMet { what: "boundary projection".into(), lo: (t - slack).f64(), hi: t.f64() });
        }
        Ok((bp, t))
    }
}
