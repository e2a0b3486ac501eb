//! Numerical toolkit for Kobayashi geometry of bounded convex domains in ℂⁿ.
//!
//! * [`modulus`]: moduli of continuity, Dini integrals, the h-transform.
//! * [`domain`]: convex domains, boundary projection, complex tangent
//!   hyperplanes and ℂ-strict convexity probes.
//! * [`model_domain`]: the planar model domains `{αh(t) < s < τ, |t| < τ}` and
//!   their embedding along complex normals.
//! * [`kobayashi`]: certified brackets for the Kobayashi metric and distance,
//!   Gromov products and closed-form disc/ball distances.
//! * [`geodesics`]: normal rays as almost-geodesics and boundary experiments.
//!
//! Every routine is generic over [`Scalar`] (`f32`/`f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod domain;
pub mod error;
pub mod geodesics;
pub mod kobayashi;
pub mod linalg;
pub mod model_domain;
pub mod modulus;
pub mod quadrature;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Modulus = modulus::Modulus<f64>;
pub type HTransform = modulus::HTransform<f64>;
pub type ConvexDomain = domain::ConvexDomain<f64>;
pub type BoundaryPoint = domain::BoundaryPoint<f64>;
pub type ComplexHyperplane = domain::ComplexHyperplane<f64>;
pub type ModelDomain = model_domain::ModelDomain<f64>;
pub type ParameterCertificate = model_domain::ParameterCertificate<f64>;
pub type DistanceBracket = kobayashi::DistanceBracket<f64>;
pub type MetricBracket = kobayashi::MetricBracket<f64>;
pub type DistanceEngine = kobayashi::DistanceEngine<f64>;
pub type DistanceOptions = kobayashi::DistanceOptions<f64>;
pub type NormalRay = geodesics::NormalRay<f64>;
pub type AlmostGeodesicReport = geodesics::AlmostGeodesicReport<f64>;

/// Library version recorded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
