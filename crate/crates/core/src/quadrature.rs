//! Adaptive Simpson quadrature.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<S> {
    pub value: S,
    /// Sum of the local Richardson error estimates.
    pub error: S,
    /// False if some panel hit the depth cap before meeting its tolerance.
    pub converged: bool,
    pub evaluations: usize,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` with at most
/// `max_depth` levels of bisection.
pub fn adaptive_simpson<S, F>(f: F, a: S, b: S, tol: S, max_depth: u32) -> Quadrature<S>
where
    S: Scalar,
    F: Fn(S) -> S,
{
    let mut evals = 3usize;
    if a == b {
        return Quadrature { value: S::zero(), error: S::zero(), converged: true, evaluations: 0 };
    }
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) * S::lit(0.5);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut state = State { evals: &mut evals, error: S::zero(), converged: true };
    let value = recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth, &mut state);
    let (error, converged) = (state.error, state.converged);
    Quadrature { value, error, converged, evaluations: evals }
}

struct State<'a, S> {
    evals: &'a mut usize,
    error: S,
    converged: bool,
}

fn simpson<S: Scalar>(a: S, b: S, fa: S, fm: S, fb: S) -> S {
    (b - a) / S::lit(6.0) * (fa + S::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<S, F>(
    f: &F,
    a: S,
    b: S,
    fa: S,
    fm: S,
    fb: S,
    whole: S,
    tol: S,
    depth: u32,
    state: &mut State<'_, S>,
) -> S
where
    S: Scalar,
    F: Fn(S) -> S,
{
    let m = (a + b) * S::lit(0.5);
    let lm = (a + m) * S::lit(0.5);
    let rm = (m + b) * S::lit(0.5);
    let flm = f(lm);
    let frm = f(rm);
    *state.evals += 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let fifteen = S::lit(15.0);
    if delta.abs() <= fifteen * tol {
        state.error = state.error + delta.abs() / fifteen;
        return left + right + delta / fifteen;
    }
    if depth == 0 || !(m > a && m < b) {
        state.converged = false;
        state.error = state.error + delta.abs() / fifteen;
        return left + right + delta / fifteen;
    }
    let half = tol * S::lit(0.5);
    recurse(f, a, m, fa, flm, fm, left, half, depth - 1, state)
        + recurse(f, m, b, fm, frm, fb, right, half, depth - 1, state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let q = adaptive_simpson(|x: f64| x * x * x - x, 0.0, 2.0, 1e-12, 20);
        assert!((q.value - 2.0).abs() < 1e-12);
        assert!(q.converged);
    }

    #[test]
    fn handles_sqrt_singular_derivative() {
        let q = adaptive_simpson(|x: f64| x.sqrt(), 0.0, 1.0, 1e-10, 40);
        assert!((q.value - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn works_in_single_precision() {
        let q = adaptive_simpson(|x: f32| x.exp(), 0.0, 1.0, 1e-5, 20);
        assert!((q.value - (1f32.exp() - 1.0)).abs() < 1e-4);
    }

    #[test]
    fn reports_depth_exhaustion() {
        let q = adaptive_simpson(|x: f64| if x < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, 1e-15, 3);
        assert!(!q.converged);
    }
}
