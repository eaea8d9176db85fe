//! Exact jet-level normal forms for generalized complex branes.
//!
//! Linear algebra is generic over the scalar; the aliases below fix the
//! exact choices used by the algorithms, the CLI and the test suites.

pub mod courant;
pub mod dirac;
pub mod flow;
pub mod hopf;
pub mod homotopy;
pub mod jet;
pub mod linalg;
pub mod linear_gca;
pub mod normalizer;
pub mod scalar;
pub mod suites;
pub mod tensor;

/// Exact rationals.
pub type Rational = dashu_ratio::RBig;
/// Gaussian rationals `ℚ(i)`.
pub type GaussRational = num_complex::Complex<Rational>;
