//! Information geometry of parametric statistical families.
//!
//! The crate computes Fisher metrics, skewness tensors, α-connections and
//! α-curvature tensors for statistical manifolds, through interchangeable
//! expectation engines (deterministic quadrature or seeded Monte Carlo), and
//! ships two families with full closed-form geometry to verify the generic
//! pipeline against:
//!
//! * [`families::GeneralizedGaussian`] — the generalized Gaussian
//!   (exponential power) location–scale manifold with fixed even shape β,
//!   which has constant α-Gaussian curvature;
//! * [`families::OrthantGaussian`] — a p-dimensional exponential family of
//!   non-Gaussian densities with Gaussian marginals, supported on the region
//!   where the coordinate product is positive, which is α-flat for every α.
//!
//! Every closed form is cross-checked against the numeric engines by the
//! [`verify`] harness; the `infogeo` binary exposes the same computations as
//! a small CLI (see the crate README and `examples/`).

pub mod cli;
pub mod error;
pub mod families;
pub mod geometry;
pub mod manifold;
pub mod numerics;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{CurvatureReport, FlatnessVerdict, MetricTensor, Tensor3, Tensor4};
pub use manifold::{ExpectationEngine, ParameterPoint, StatisticalFamily, Support};
pub use numerics::{QuadratureRule, RandomStream, StepPolicy};
