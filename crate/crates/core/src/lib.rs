//! Semiclassical discrete orthogonal polynomials for hypergeometric Pearson
//! weights, computed at high precision, together with a suite of residual
//! checks for their structure matrices and integrable flows.
//!
//! The layers build on each other:
//! - [`hyperweight`]: weights, Pearson polynomials, convergence, parameter shifts;
//! - [`momentlin`]: moments, Hankel truncations, Cholesky, tau derivatives;
//! - [`opstruct`]: Pascal, dressed Pascal, Jacobi and Laguerre-Freud matrices;
//! - [`integrable`]: contiguous relations, lattices, Toda/KP flows;
//! - [`report`]: check results, the suite runner and serialization.

pub mod error;
pub mod hyperweight;
pub mod integrable;
pub mod linalg;
pub mod momentlin;
pub mod opstruct;
pub mod poly;
pub mod precision;
pub mod report;

pub use error::{Error, Result};
pub use hyperweight::{ConvergenceClass, HypergeometricWeight, PearsonPolynomials, Shift};
pub use precision::PrecisionContext;
