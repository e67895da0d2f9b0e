//! Dynamic Gaussian copula default-time model.

pub mod error;
pub mod gaussian;
pub mod intensity;
pub mod model;
pub mod quadrature;
pub mod simulate;
pub mod stats;
pub mod tva;
pub mod verify;

pub use error::{DgcError, Result};
