use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::sampling;
use crate::scalar::Scalar;

use super::Modulus;

/// Slack allowed in `ω(s+t) ≤ ω(s) + ω(t)`.
const SUBADDITIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Subadditivity<S> {
    /// Largest observed `ω(s+t) − ω(s) − ω(t)`.
    Pass { max_gap: S },
    /// The worst violating pair.
    Fail { s: S, t: S, gap: S },
}

impl<S> Subadditivity<S> {
    pub fn passed(&self) -> bool {
        matches!(self, Subadditivity::Pass { .. })
    }
}

/// `n × n` pairs `(s, t)` with `s, t ∈ [0, limit)` on a uniform grid.
pub fn pair_grid<S: Scalar>(limit: S, n: usize) -> Vec<(S, S)> {
    let step = limit / S::of(n.max(1));
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (step * S::of(i), step * S::of(j))))
        .collect()
}

pub fn check_subadditive<S: Scalar>(omega: &Modulus<S>, grid: &[(S, S)]) -> Result<Subadditivity<S>> {
    if grid.is_empty() {
        return Err(Error::Argument("empty sub-additivity grid".into()));
    }
    let mut worst: Option<(S, S, S)> = None;
    for &(s, t) in grid {
        if !(s >= S::zero() && t >= S::zero()) || s + t > omega.radius() {
            return Err(Error::Argument(format!(
                "grid pair ({s}, {t}) outside s, t >= 0, s + t <= {}",
                omega.radius()
            )));
        }
        let gap = omega.eval(s + t)? - omega.eval(s)? - omega.eval(t)?;
        if worst.map_or(true, |w| gap > w.2) {
            worst = Some((s, t, gap));
        }
    }
    let (s, t, gap) = worst.expect("grid is non-empty");
    if gap <= S::lit(SUBADDITIVE_SLACK) {
        Ok(Subadditivity::Pass { max_gap: gap })
    } else {
        Ok(Subadditivity::Fail { s, t, gap })
    }
}

/// Abscissae used by [`empirical_modulus`]: a dyadic ladder below `diam/2`
/// merged with a uniform grid of 256 steps on `(0, diam]`.
fn abscissae<S: Scalar>(diam: S) -> Vec<S> {
    let mut ts: Vec<S> = (1..=40).map(|j| diam * S::lit(2f64.powi(-j))).collect();
    ts.extend((1..=256).map(|k| diam * S::of(k) / S::of(256)));
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite abscissae"));
    ts.dedup();
    ts
}

/// Sampled modulus of continuity of `f` on the closed ball `B(center, radius)`.
///
/// `budget` points are drawn uniformly from the ball; for every abscissa
/// `t_k` the largest `|f(x) − f(y)|` over sampled pairs with `‖x − y‖ ≤ t_k` is
/// recorded. The result is the least concave majorant of those values
/// (anchored at `(0, 0)`), which keeps it non-decreasing and sub-additive.
pub fn empirical_modulus<S, F>(f: F, center: &[S], radius: S, budget: usize, seed: u64) -> Result<Modulus<S>>
where
    S: Scalar,
    F: Fn(&[S]) -> S,
{
    if budget < 2 {
        return Err(Error::Argument(format!("empirical modulus needs budget >= 2, got {budget}")));
    }
    if center.is_empty() || !(radius > S::zero()) {
        return Err(Error::Argument("empirical modulus needs a non-degenerate ball".into()));
    }
    let mut rng = sampling::rng(seed);
    let points: Vec<Vec<S>> = (0..budget).map(|_| sampling::point_in_ball(&mut rng, center, radius)).collect();
    let values: Vec<S> = points.iter().map(|p| f(p)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Sampling(format!("f is not finite at sample {:?}", points[i])));
    }

    let diam = radius + radius;
    let ts = abscissae(diam);
    let bins = (0..budget)
        .into_par_iter()
        .map(|i| {
            let mut local = vec![S::zero(); ts.len()];
            for j in (i + 1)..budget {
                let d = linalg::dist(&points[i], &points[j]);
                let k = ts.partition_point(|&t| t < d).min(ts.len() - 1);
                let jump = (values[i] - values[j]).abs();
                if jump > local[k] {
                    local[k] = jump;
                }
            }
            local
        })
        .reduce(
            || vec![S::zero(); ts.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        );

    let mut running = S::zero();
    let raw: Vec<(S, S)> = ts
        .iter()
        .zip(&bins)
        .map(|(&t, &b)| {
            running = running.max(b);
            (t, running)
        })
        .collect();
    Modulus::empirical(concave_majorant(&raw))
}

/// Least concave majorant of `(0,0) ∪ points`, evaluated back at the input
/// abscissae. `points` must have ascending positive abscissae.
fn concave_majorant<S: Scalar>(points: &[(S, S)]) -> Vec<(S, S)> {
    let mut hull: Vec<(S, S)> = vec![(S::zero(), S::zero())];
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it lies on or below the chord a → p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= S::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    points
        .iter()
        .map(|&(t, v)| {
            let idx = hull.partition_point(|h| h.0 <= t).clamp(1, hull.len() - 1);
            let (t0, v0) = hull[idx - 1];
            let (t1, v1) = hull[idx];
            let on_hull = if t >= t1 { v1 } else { v0 + (v1 - v0) * (t - t0) / (t1 - t0) };
            (t, on_hull.max(v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_grid_passes() {
        let m = Modulus::hoelder(0.5, 1.0).unwrap();
        let r = check_subadditive(&m, &pair_grid(0.5, 50)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn square_fails_with_gap_half() {
        let nodes: Vec<(f64, f64)> = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0].iter().map(|&t| (t, t * t)).collect();
        let m = Modulus::empirical(nodes).unwrap();
        match check_subadditive(&m, &[(0.5, 0.5)]).unwrap() {
            Subadditivity::Fail { s, t, gap } => {
                assert_eq!((s, t), (0.5, 0.5));
                assert!((gap - 0.5).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linear_is_equality_case() {
        let m = Modulus::<f64>::linear(1.0).unwrap();
        match check_subadditive(&m, &pair_grid(0.5, 20)).unwrap() {
            Subadditivity::Pass { max_gap } => assert!(max_gap.abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_grid_is_an_error() {
        let m = Modulus::<f64>::linear(1.0).unwrap();
        assert!(matches!(check_subadditive(&m, &[]), Err(Error::Argument(_))));
        assert!(matches!(check_subadditive(&m, &[(0.7, 0.7)]), Err(Error::Argument(_))));
    }

    #[test]
    fn identity_function() {
        let m = empirical_modulus(|x: &[f64]| x[0], &[0.0], 1.0, 4_000, 3).unwrap();
        for k in 1..=64 {
            let t = 2.0 * k as f64 / 64.0;
            assert!((m.eval(t).unwrap() - t).abs() <= 0.02, "t={t}: {}", m.eval(t).unwrap());
        }
    }

    #[test]
    fn constant_function() {
        let m = empirical_modulus(|_: &[f64]| 4.2, &[0.0, 0.0], 1.0, 500, 1).unwrap();
        assert_eq!(m.eval(1.3).unwrap(), 0.0);
        assert_eq!(m.eval(2.0).unwrap(), 0.0);
    }

    /// Exhaustive pairwise oracle: sup of |f(x)-f(y)| over pairs at distance <= t.
    fn brute_force(points: &[f64], f: impl Fn(f64) -> f64, t: f64) -> f64 {
        let mut best = 0.0f64;
        for (i, &x) in points.iter().enumerate() {
            for &y in &points[i + 1..] {
                if (x - y).abs() <= t {
                    best = best.max((f(x) - f(y)).abs());
                }
            }
        }
        best
    }

    #[test]
    fn sqrt_abs_against_oracle() {
        let f = |x: f64| x.abs().sqrt();
        let m = empirical_modulus(|x: &[f64]| f(x[0]), &[0.0], 1.0, 400, 11).unwrap();
        let mut rng = sampling::rng(11);
        let pts: Vec<f64> = (0..400).map(|_| sampling::point_in_ball(&mut rng, &[0.0], 1.0)[0]).collect();
        for k in 1..=32 {
            let t = 2.0 * k as f64 / 32.0;
            let got = m.eval(t).unwrap();
            // the majorant dominates the raw sampled modulus
            assert!(got >= brute_force(&pts, f, t) - 1e-15);
            assert!((got - t.sqrt().min(1.0)).abs() <= 0.05, "t={t}: {got}");
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[1].abs().sqrt();
        let a = empirical_modulus(f, &[0.1, 0.2], 0.5, 300, 9).unwrap();
        let b = empirical_modulus(f, &[0.1, 0.2], 0.5, 300, 9).unwrap();
        assert_eq!(a, b);
        assert!(check_subadditive(&a, &pair_grid(0.5, 100)).unwrap().passed());
    }

    #[test]
    fn non_finite_values_are_sampling_errors() {
        let r = empirical_modulus(|x: &[f64]| 1.0 / x[0].signum().max(0.0), &[0.0], 1.0, 10, 0);
        assert!(matches!(r, Err(Error::Sampling(_))));
        assert!(matches!(empirical_modulus(|x: &[f64]| x[0], &[0.0], 1.0, 1, 0), Err(Error::Argument(_))));
    }
}
