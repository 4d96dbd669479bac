//! Shipped statistical families with closed-form geometry.

pub mod generalized_gaussian;
pub mod location_gaussian;
pub mod orthant_gaussian;

pub use generalized_gaussian::{ConnectionConstants, GeneralizedGaussian};
pub use location_gaussian::LocationGaussian;
pub use orthant_gaussian::OrthantGaussian;
