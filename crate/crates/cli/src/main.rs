//! `koba`: configuration-driven experiments on Kobayashi geometry.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Map;

mod config;
mod experiments;
mod report;

use config::Configured;
use report::Report;

#[derive(Parser)]
#[command(name = "koba", version, about = "Certified Kobayashi-geometry experiments on bounded convex domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dini integral ∫₀^σ ω(t)/t dt of a modulus.
    Dini(config::DiniConfig),
    /// Certified (m, δ₀, α, τ), the tangent-angle check and the embedding at one point.
    ModelCheck(config::ModelConfig),
    /// Embedding of the model domain along complex normals at boundary points.
    EmbedCheck(config::EmbedConfig),
    /// Graham bracket on the Kobayashi metric.
    Metric(config::MetricConfig),
    /// Bracket on the Kobayashi distance.
    Distance(config::DistanceConfig),
    /// Bracket on a Gromov product.
    Gromov(config::GromovConfig),
    /// Escape-rate profile hi(z₀, z) − ½log(1/δ(z)).
    Escape(config::EscapeConfig),
    /// Normal ray as an almost-geodesic.
    AlmostGeodesic(config::GeodesicConfig),
    /// Gromov-product matrix of two boundary sequences.
    GromovExperiment(config::ExperimentConfig),
    /// Image cluster of a boundary sequence under a known isometry.
    ExtensionProbe(config::ProbeConfig),
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Exit status 2.
    #[error("{0}")]
    Config(String),
    /// Exit status 1.
    #[error("{0}")]
    Experiment(String),
}

impl From<koba_core::Error> for Failure {
    fn from(e: koba_core::Error) -> Self {
        use koba_core::Error::*;
        match e {
            Parse(_) | Argument(_) | InvalidModulus(_) | Domain(_) | Sequence(_) => Failure::Config(e.to_string()),
            _ => Failure::Experiment(e.to_string()),
        }
    }
}

fn threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("KOBA_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("KOBA_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Config(e.to_string()))
}

fn run<C: Configured>(name: &str, flags: C, body: fn(&C) -> Result<Report, Failure>) -> ExitCode {
    let cfg = match config::resolve(name, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("koba {name}: {e}");
            return ExitCode::from(2);
        }
    };
    let resolved = serde_json::to_value(&cfg).expect("configs serialize");
    let (report, status) = match body(&cfg) {
        Ok(r) => {
            let status = if r.failed { "failed" } else { "ok" };
            (r, status)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("koba {name}: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Experiment(msg)) => {
            eprintln!("koba {name}: {msg}");
            let mut extra = Map::new();
            extra.insert("error".into(), msg.into());
            let summary = report::summary_json(name, &resolved, "error", &extra);
            let text = serde_json::to_string_pretty(&summary).expect("JSON values serialize");
            match cfg.out() {
                Some(p) => {
                    if let Err(e) = std::fs::write(p.with_extension("json"), text + "\n") {
                        eprintln!("koba {name}: cannot write summary: {e}");
                    }
                }
                None => eprintln!("{text}"),
            }
            return ExitCode::from(1);
        }
    };
    let summary = report::summary_json(name, &resolved, status, &report.summary);
    if let Err(e) = report::emit(&report, &summary, cfg.out()) {
        eprintln!("koba {name}: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if report.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = threads() {
        eprintln!("koba: {e}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::Dini(c) => run("dini", c, experiments::dini),
        Command::ModelCheck(c) => run("model-check", c, experiments::model_check),
        Command::EmbedCheck(c) => run("embed-check", c, experiments::embed_check),
        Command::Metric(c) => run("metric", c, experiments::metric),
        Command::Distance(c) => run("distance", c, experiments::distance),
        Command::Gromov(c) => run("gromov", c, experiments::gromov),
        Command::Escape(c) => run("escape", c, experiments::escape),
        Command::AlmostGeodesic(c) => run("almost-geodesic", c, experiments::almost_geodesic),
        Command::GromovExperiment(c) => run("gromov-experiment", c, experiments::gromov_experiment),
        Command::ExtensionProbe(c) => run("extension-probe", c, experiments::extension_probe),
    }
}
