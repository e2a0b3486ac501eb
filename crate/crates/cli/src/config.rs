//! Experiment configurations: command-line flags over an optional JSON file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::Failure;

/// A point of ℝ^{2n}, written `x1,y1,...,xn,yn` on the command line or as a
/// JSON array (or the same string) in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "Vec<f64>")]
pub struct Point(pub Vec<f64>);

#[derive(Deserialize)]
#[serde(untagged)]
enum PointRepr {
    List(Vec<f64>),
    Text(String),
}

impl TryFrom<PointRepr> for Point {
    type Error = String;

    fn try_from(r: PointRepr) -> Result<Self, String> {
        match r {
            PointRepr::List(v) => Ok(Point(v)),
            PointRepr::Text(s) => s.parse(),
        }
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
        match v {
            Ok(v) if !v.is_empty() => Ok(Point(v)),
            _ => Err(format!("`{s}` is not a comma-separated list of numbers")),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Implemented by every subcommand's flag set.
pub trait Configured: Serialize + DeserializeOwned {
    fn config_path(&self) -> Option<&Path>;
    fn out(&self) -> Option<&Path>;
}

macro_rules! configured {
    ($($t:ty),*) => {$(
        impl Configured for $t {
            fn config_path(&self) -> Option<&Path> {
                self.config.as_deref()
            }
            fn out(&self) -> Option<&Path> {
                self.out.as_deref()
            }
        }
    )*};
}

configured!(
    DiniConfig,
    ModelConfig,
    EmbedConfig,
    MetricConfig,
    DistanceConfig,
    GromovConfig,
    EscapeConfig,
    GeodesicConfig,
    ExperimentConfig,
    ProbeConfig
);

/// Segment tuning shared by the experiments built on distance brackets.
pub trait BracketTuning {
    fn tuning(&self) -> (Option<f64>, Option<usize>, Option<usize>);
}

macro_rules! tuned {
    ($($t:ty),*) => {$(
        impl BracketTuning for $t {
            fn tuning(&self) -> (Option<f64>, Option<usize>, Option<usize>) {
                (self.tol, self.hyperplanes, self.max_intervals)
            }
        }
    )*};
}

tuned!(DistanceConfig, GromovConfig, EscapeConfig, GeodesicConfig, ExperimentConfig, ProbeConfig);

/// Reads the JSON file named by `--config` (if any), lays the flags over it
/// and validates the result against the subcommand's keys.
pub fn resolve<C: Configured>(experiment: &str, flags: C) -> Result<C, Failure> {
    let mut merged = Map::new();
    if let Some(path) = flags.config_path() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(mut file) = value else {
            return Err(Failure::Config(format!("config {} must be a JSON object", path.display())));
        };
        if let Some(kind) = file.remove("experiment") {
            if kind.as_str() != Some(experiment) {
                return Err(Failure::Config(format!("config is for experiment {kind}, not `{experiment}`")));
            }
        }
        merged = file;
    }
    let Value::Object(over) = serde_json::to_value(&flags).map_err(|e| Failure::Config(e.to_string()))? else {
        unreachable!("flag sets serialize to objects")
    };
    merged.extend(over);
    serde_json::from_value(Value::Object(merged)).map_err(|e| Failure::Config(format!("bad config: {e}")))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DiniConfig {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    /// CSV output path; the JSON summary goes next to it.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// `hoelder:<alpha>:<c>`, `log:<eps>`, `linear:<c>` or `empirical:<path.csv>`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ModelConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// `disc`, `ball:<n>`, `ellipsoid:<a1,...,an>`, `polydisc:<n>`,
    /// `profile:<modulus>:<alpha>:<tau>` or `graph:<modulus>:<n>`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    /// Modulus of continuity of the gradient of ρ (default `linear:1`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Boundary samples for the gradient bound.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Arc-length grid of the tangent-angle check.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_points: Option<usize>,
    /// Boundary point for the embedding check (default: marked point or e₁).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Point>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EmbedConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Checked boundary point; without it `boundary-points` samples are used.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Point>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_points: Option<usize>,
    /// Grid values of `s` (geometric).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_s: Option<usize>,
    /// Grid values of `t` (uniform).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_t: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MetricConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Point>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Point>,
    /// Relative width of the inscribed-radius bracket.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DistanceConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Point>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Point>,
    /// Relative change at which segment refinement stops.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Sampled supporting hyperplanes for lower bounds.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplanes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_intervals: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GromovConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Point>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Point>,
    /// Base point (default: the center of the domain).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub o: Option<Point>,
    /// Relative change at which segment refinement stops.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Sampled supporting hyperplanes for lower bounds.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplanes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_intervals: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EscapeConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z0: Option<Point>,
    /// Boundary directions sampled.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Relative depths, geometric over [1e-6, 1e-1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depths: Option<usize>,
    /// Relative change at which segment refinement stops.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Sampled supporting hyperplanes for lower bounds.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplanes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_intervals: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GeodesicConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Point>,
    /// Ray scale; without it half the certified embedding depth is used,
    /// which needs `seed`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Time horizon (default `min(8, ½log(ε/10⁻⁸R))`).
    #[arg(long = "T")]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Uniform time grid size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Modulus used to certify ε.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// `K` up to which the ray is reported as an almost-geodesic.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_cap: Option<f64>,
    /// Relative change at which segment refinement stops.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Sampled supporting hyperplanes for lower bounds.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplanes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_intervals: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Point>,
    /// Second boundary point (default `xi`).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi2: Option<Point>,
    /// Sequences `ξ + scale·2^{−ν}η`, `ν = 1..=depth`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub o: Option<Point>,
    /// Divergence thresholds along the diagonal.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Point>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap_factor: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap_floor: Option<f64>,
    /// Relative change at which segment refinement stops.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Sampled supporting hyperplanes for lower bounds.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplanes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_intervals: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ProbeConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// `identity`, `disc-automorphism:<re>,<im>,<theta>`,
    /// `ball-automorphism:<a1,...>` or `disc-into-ball:<n>`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isometry: Option<String>,
    /// Domain of the identity map (default `disc`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Point>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Tail diameter counted as extension evidence.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter_tol: Option<f64>,
    /// Relative change at which segment refinement stops.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Sampled supporting hyperplanes for lower bounds.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplanes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_intervals: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse_both_ways() {
        assert_eq!("1, 0,-0.5".parse::<Point>().unwrap(), Point(vec![1.0, 0.0, -0.5]));
        assert!("1,,2".parse::<Point>().is_err());
        let p: Point = serde_json::from_str("[0.5, 1]").unwrap();
        assert_eq!(p.0, vec![0.5, 1.0]);
        let p: Point = serde_json::from_str("\"0.5,1\"").unwrap();
        assert_eq!(p.0, vec![0.5, 1.0]);
    }

    #[test]
    fn flags_override_file_and_unknown_keys_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"experiment": "dini", "modulus": "log:1", "sigma": 0.25}"#).unwrap();
        let flags = DiniConfig { config: Some(path.clone()), sigma: Some(0.5), ..Default::default() };
        let c = resolve("dini", flags).unwrap();
        assert_eq!(c.modulus.as_deref(), Some("log:1"));
        assert_eq!(c.sigma, Some(0.5));

        std::fs::write(&path, r#"{"modulus": "log:1", "sigma": 0.25, "bogus": 1}"#).unwrap();
        let flags = DiniConfig { config: Some(path.clone()), ..Default::default() };
        let Err(Failure::Config(msg)) = resolve("dini", flags) else { panic!("unknown key accepted") };
        assert!(msg.contains("bogus"), "{msg}");

        std::fs::write(&path, r#"{"experiment": "escape"}"#).unwrap();
        let flags = DiniConfig { config: Some(path), ..Default::default() };
        assert!(matches!(resolve("dini", flags), Err(Failure::Config(_))));
    }
}
