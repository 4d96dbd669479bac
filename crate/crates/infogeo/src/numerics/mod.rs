//! Special functions, quadrature, finite differences and small SPD linear
//! algebra shared by every geometry computation.

pub mod diff;
pub mod gamma;
pub mod linalg;
pub mod quadrature;
pub mod rng;

pub use diff::{central_difference, mixed_central_difference, DiffOrder, ScaleMode, StepPolicy};
pub use gamma::{gamma_ratio, log_gamma};
pub use linalg::{spd_inverse, Matrix};
pub use quadrature::{integrate_expectation, DomainMap, IntegrationDomain, QuadratureRule};
pub use rng::RandomStream;
