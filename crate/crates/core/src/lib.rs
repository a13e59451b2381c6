//! Numerics for the CUE characteristic-polynomial field
//! `U(z) = log|det(1 - z U_N)|` and the log-correlated Gaussian field `G`
//! with covariance `-log|1 - z conj(y)| / 2`.
//!
//! The crate is split by subsystem:
//!
//! * [`geometry`]: Poincaré-disk metric, automorphisms, geodesic rays.
//! * [`gaussian_field`]: covariance calculus, exponential biases, samplers for `G`.
//! * [`cue`]: Haar samplers, evaluation of `U` on points and grids, the
//!   deterministic radial inequalities.
//! * [`toeplitz`]: exact Toeplitz determinant identities for rational symbols
//!   and the subset expansion of `E exp(B(U))`.
//! * [`barrier`]: ballot and barrier probabilities for Gaussian walks.
//!
//! Randomised routines take explicit seeds or [`rng::StreamRng`] handles and are
//! deterministic given them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod cue;
pub mod error;
pub mod gaussian_field;
pub mod geometry;
pub mod linalg;
pub mod registry;
pub mod rng;
pub mod stats;
pub mod toeplitz;

pub use error::{Error, Result};
pub use geometry::DiskPoint;
pub use num_complex::Complex64;
