use thiserror::Error;

/// Errors raised by the library. Numeric payloads are widened to `f64`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("tolerance not met for {what}: best bracket [{lo}, {hi}]")]
    ToleranceNotMet { what: String, lo: f64, hi: f64 },

    #[error("ill-conditioned boundary: gradient norm {0:e}")]
    IllConditionedBoundary(f64),

    #[error("degenerate defining function: sampled gradient lower bound {0:e}")]
    DegenerateDefiningFunction(f64),

    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    #[error("embedding violation at {} grid point(s), first at zeta = {:?}", .offending.len(), .offending.first())]
    EmbeddingViolation { offending: Vec<(f64, f64)> },

    #[error("conditioning error: {0}")]
    Conditioning(String),

    #[error("ray escapes the domain at t = {t} (scale {eps} not certified)")]
    RayEscape { t: f64, eps: f64 },

    #[error("bracket inconsistency at (s, t) = ({s}, {t}): required K {required} exceeds {k_max}")]
    BracketInconsistency { s: f64, t: f64, required: f64, k_max: f64 },

    #[error("sequence error: {0}")]
    Sequence(String),

    #[error("map error: {0}")]
    Map(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
