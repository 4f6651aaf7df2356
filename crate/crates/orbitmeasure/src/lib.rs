//! Numerical machinery for the joint radial densities of matrix ensembles
//! that arise from compact group actions: inner-product geometry, matrix
//! Lie models, the orbit Jacobian `J(y) = |det Psi_y|`, a registry of
//! concrete ensembles, and statistical validation against sampled spectra.

pub mod ensemble;
pub mod error;
pub mod instances;
pub mod lie;
pub mod linalg;
pub mod realify;
pub mod spectra;
pub mod tol;
pub mod validation;

pub use error::Error;
pub use tol::Tolerances;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
