//! Moduli of continuity: evaluation, Dini integrals, the h-transform and
//! sampled (empirical) moduli.

mod dini;
mod empirical;
mod htransform;

pub use dini::{dini_integral, dini_integral_with, DiniOptions, DiniOutcome};
pub use empirical::{check_subadditive, empirical_modulus, pair_grid, Subadditivity};
pub use htransform::HTransform;

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The family a modulus belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum ModulusKind<S> {
    /// `c·t^α` with `α ∈ (0, 1]`.
    Hoelder { alpha: S, c: S },
    /// `f_ε(t) = 1/|log t|^{1+ε}` for `t ∈ (0, 1)`, `f_ε(0) = 0`.
    LogFamily { eps: S },
    /// `c·t`.
    Linear { c: S },
    /// Piecewise-linear interpolation of `(t, value)` nodes; the first node is
    /// always `(0, 0)`.
    Empirical { nodes: Vec<(S, S)> },
}

/// A modulus of continuity `ω` on `[0, ε₀]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulus<S> {
    kind: ModulusKind<S>,
    radius: S,
}

impl<S: Scalar> Modulus<S> {
    pub fn hoelder(alpha: S, c: S) -> Result<Self> {
        if !(alpha > S::zero() && alpha <= S::one()) {
            return Err(Error::InvalidModulus(format!("hoelder exponent {alpha} outside (0, 1]")));
        }
        if !(c > S::zero()) || !c.is_finite() {
            return Err(Error::InvalidModulus(format!("hoelder constant {c} must be positive")));
        }
        Ok(Self { kind: ModulusKind::Hoelder { alpha, c }, radius: S::one() })
    }

    pub fn log_family(eps: S) -> Result<Self> {
        if !(eps > S::zero()) || !eps.is_finite() {
            return Err(Error::InvalidModulus(format!("log family needs eps > 0, got {eps}")));
        }
        Ok(Self { kind: ModulusKind::LogFamily { eps }, radius: S::lit(0.5) })
    }

    pub fn linear(c: S) -> Result<Self> {
        if !(c > S::zero()) || !c.is_finite() {
            return Err(Error::InvalidModulus(format!("linear constant {c} must be positive")));
        }
        Ok(Self { kind: ModulusKind::Linear { c }, radius: S::one() })
    }

    /// Builds an empirical modulus from ascending `(t, value)` nodes. A node
    /// `(0, 0)` is prepended when the first abscissa is positive.
    pub fn empirical(nodes: Vec<(S, S)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidModulus("empirical modulus has no nodes".into()));
        }
        let mut out = Vec::with_capacity(nodes.len() + 1);
        out.push((S::zero(), S::zero()));
        for (i, &(t, v)) in nodes.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() || t < S::zero() || v < S::zero() {
                return Err(Error::InvalidModulus(format!("bad empirical node ({t}, {v})")));
            }
            if t == S::zero() {
                if i != 0 || v != S::zero() {
                    return Err(Error::InvalidModulus("empirical modulus must start at (0, 0)".into()));
                }
                continue;
            }
            let (pt, pv) = out[out.len() - 1];
            if t <= pt {
                return Err(Error::InvalidModulus(format!(
                    "empirical abscissae must be strictly ascending ({pt} then {t})"
                )));
            }
            if v < pv {
                return Err(Error::InvalidModulus(format!(
                    "empirical modulus is not monotone: {pv} at t={pt} then {v} at t={t}"
                )));
            }
            out.push((t, v));
        }
        if out.len() < 2 {
            return Err(Error::InvalidModulus("empirical modulus needs a positive abscissa".into()));
        }
        let radius = out.last().map(|n| n.0).unwrap_or_else(S::zero);
        Ok(Self { kind: ModulusKind::Empirical { nodes: out }, radius })
    }

    /// Reads `t,value` rows (header optional) from a CSV file.
    pub fn empirical_from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let mut nodes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
                continue;
            }
            let mut cols = line.split(',');
            let (Some(t), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Parse(format!("{}:{}: expected `t,value`", path.display(), lineno + 1)));
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), lineno + 1)))
            };
            nodes.push((S::lit(parse(t)?), S::lit(parse(v)?)));
        }
        Self::empirical(nodes)
    }

    /// Parses `hoelder:<alpha>:<c>`, `log:<eps>`, `linear:<c>` or
    /// `empirical:<path.csv>`. An optional trailing `:<radius>` overrides ε₀
    /// for the analytic kinds.
    pub fn parse(literal: &str) -> Result<Self> {
        let (kind, rest) = literal.split_once(':').unwrap_or((literal, ""));
        let nums = |n: usize| -> Result<Vec<S>> {
            let parts: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(':').collect() };
            if parts.len() != n && parts.len() != n + 1 {
                return Err(Error::Parse(format!("modulus literal `{literal}` expects {n} numeric field(s)")));
            }
            parts
                .iter()
                .map(|p| {
                    p.parse::<f64>()
                        .map(S::lit)
                        .map_err(|_| Error::Parse(format!("bad number `{p}` in modulus literal `{literal}`")))
                })
                .collect()
        };
        let (modulus, extra) = match kind {
            "hoelder" => {
                let v = nums(2)?;
                (Self::hoelder(v[0], v[1])?, v.get(2).copied())
            }
            "log" => {
                let v = nums(1)?;
                (Self::log_family(v[0])?, v.get(1).copied())
            }
            "linear" => {
                let v = nums(1)?;
                (Self::linear(v[0])?, v.get(1).copied())
            }
            "empirical" => (Self::empirical_from_csv(Path::new(rest))?, None),
            other => return Err(Error::Parse(format!("unknown modulus kind `{other}`"))),
        };
        match extra {
            Some(r) => modulus.with_radius(r),
            None => Ok(modulus),
        }
    }

    /// Overrides the radius of definition of an analytic modulus.
    pub fn with_radius(mut self, radius: S) -> Result<Self> {
        if !(radius > S::zero()) || !radius.is_finite() {
            return Err(Error::InvalidModulus(format!("radius {radius} must be positive")));
        }
        match self.kind {
            ModulusKind::LogFamily { .. } if radius >= S::one() => {
                return Err(Error::InvalidModulus("log family is only a modulus on [0, 1)".into()))
            }
            ModulusKind::Empirical { .. } => {
                return Err(Error::InvalidModulus("empirical radius is fixed by its nodes".into()))
            }
            _ => {}
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn kind(&self) -> &ModulusKind<S> {
        &self.kind
    }

    /// ε₀, the right end of the interval of definition.
    pub fn radius(&self) -> S {
        self.radius
    }

    pub fn eval(&self, t: S) -> Result<S> {
        if !(t >= S::zero() && t <= self.radius) {
            return Err(Error::Domain(format!("modulus evaluated at t = {t} outside [0, {}]", self.radius)));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: S) -> S {
        if t <= S::zero() {
            return S::zero();
        }
        match &self.kind {
            ModulusKind::Hoelder { alpha, c } => *c * t.powf(*alpha),
            ModulusKind::Linear { c } => *c * t,
            ModulusKind::LogFamily { eps } => {
                if t >= S::one() {
                    return S::infinity();
                }
                S::one() / (-t.ln()).powf(S::one() + *eps)
            }
            ModulusKind::Empirical { nodes } => interpolate(nodes, t),
        }
    }

    /// `ω(e^{-u})`, evaluated without forming `e^{-u}` for the analytic kinds.
    pub(crate) fn eval_log(&self, u: S) -> S {
        match &self.kind {
            ModulusKind::Hoelder { alpha, c } => *c * (-*alpha * u).exp(),
            ModulusKind::Linear { c } => *c * (-u).exp(),
            ModulusKind::LogFamily { eps } => {
                if u <= S::zero() {
                    S::infinity()
                } else {
                    S::one() / u.powf(S::one() + *eps)
                }
            }
            ModulusKind::Empirical { nodes } => interpolate(nodes, (-u).exp()),
        }
    }

    /// Re-checks the modulus invariants (used for externally supplied data).
    pub fn validate(&self) -> Result<()> {
        if let ModulusKind::Empirical { nodes } = &self.kind {
            for w in nodes.windows(2) {
                if w[1].1 < w[0].1 {
                    return Err(Error::InvalidModulus(format!(
                        "empirical modulus is not monotone near t = {}",
                        w[1].0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Short literal describing this modulus (for reports).
    pub fn label(&self) -> String {
        let (base, default_radius) = match &self.kind {
            ModulusKind::Hoelder { alpha, c } => (format!("hoelder:{alpha}:{c}"), S::one()),
            ModulusKind::LogFamily { eps } => (format!("log:{eps}"), S::lit(0.5)),
            ModulusKind::Linear { c } => (format!("linear:{c}"), S::one()),
            ModulusKind::Empirical { nodes } => return format!("empirical[{} nodes]", nodes.len()),
        };
        if self.radius == default_radius {
            base
        } else {
            format!("{base}:{}", self.radius)
        }
    }
}

impl<S: Scalar> fmt::Display for Modulus<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn interpolate<S: Scalar>(nodes: &[(S, S)], t: S) -> S {
    let last = nodes[nodes.len() - 1];
    if t >= last.0 {
        return last.1;
    }
    let idx = nodes.partition_point(|n| n.0 <= t);
    let (t0, v0) = nodes[idx - 1];
    let (t1, v1) = nodes[idx];
    v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
}
