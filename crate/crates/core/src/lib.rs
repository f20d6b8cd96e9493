//! Numerical laboratory for multipolar Hardy inequalities on the space forms
//! `R^n`, `S^n` and `H^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`curvature`] holds the generalized trigonometric functions `s_c`,
//!   `ct_c`, `D_c` and the constants built from them.
//! * [`geometry`] implements the embedded models (points, distances, log/exp
//!   maps, distance gradients), pole sets, axisymmetric quadrature grids and
//!   analytic test fields.
//! * [`hardy`] evaluates the multipolar weights and checks the inequalities.
//! * [`sharpness`] evaluates the optimality test functions and an empirical
//!   Rayleigh quotient probe.
//! * [`comparison`] runs triangle and Laplace comparison suites.
//! * [`variational`] solves the two bipolar Schrödinger-type problems on
//!   axisymmetric finite-volume grids.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod comparison;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod hardy;
pub mod sharpness;
pub mod variational;

pub use curvature::Curvature;
pub use error::{Error, Result};
pub use geometry::{ModelPoint, ModelSpace, PoleSet};
