//! Numerical verification and construction of gradient Yamabe solitons on
//! warped products B ×_f F whose base is conformal to pseudo-Euclidean space.
//!
//! The crate evaluates the soliton PDE system of such warped products as
//! pointwise residuals, reduces it to ODEs under a translation-invariant
//! ansatz ξ = Σ αₖxₖ, constructs the explicit solution families (steady
//! quadrature family, Riccati family, lightlike family), and cross-validates
//! every construction against the general equations.
//!
//! Module map:
//! - [`fields`]: twice-differentiable scalar fields and 1-D profiles with
//!   analytic, dual-number and finite-difference backends;
//! - [`geometry`]: Christoffel symbols, covariant Hessian, Laplacian and
//!   scalar curvature of the conformal metric ḡ = g/φ²;
//! - [`warped`]: warped-product curvature, the full soliton residual system
//!   and structure diagnostics;
//! - [`reduction`]: causal typing of directions, the reduced ODE residuals,
//!   the monotone-potential law and the sign obstruction;
//! - [`constructors`]: the explicit solution families, self-validated
//!   through the ODE residuals;
//! - [`numerics`]: adaptive Runge–Kutta integration with events, adaptive
//!   Simpson quadrature, bracketed root finding.

// Positivity checks are written as `!(v > 0.0)` on purpose: NaN must take
// the violation path, which `v <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructors;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod mat;
pub mod numerics;
pub mod reduction;
pub mod warped;

pub use error::{Error, Result};
