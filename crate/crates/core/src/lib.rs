//! Nodal sets of bivariate random trigonometric polynomials.
//!
//! The crate samples polynomials `f_n(x, y) = sum a_kl cos(kx) cos(ly)` with
//! i.i.d. centered unit-variance coefficients, extracts their zero sets,
//! measures lengths per pi-cell, and compares the results against the exact
//! Gaussian Kac-Rice expectation and against limiting Gaussian fields.

pub mod arith;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod experiment;
pub mod field;
pub mod geometry;
pub mod kacrice;
pub mod limitfield;
pub mod nodal;
pub mod quad;
pub mod stats;
pub mod trigpoly;

pub use coeffs::CoeffLaw;
pub use error::{Error, Result};
pub use trigpoly::{Coordinates, TrigPoly};
