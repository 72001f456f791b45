//! Caputo fractional derivatives and fractional gradient descent.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! - [`caputo`]: the unified left/right Caputo derivative of a scalar
//!   callable, evaluated with a Gauss-Jacobi rule that absorbs the endpoint
//!   singularity, plus the relation between the order-α derivative and `f'`.
//! - [`bounds`]: the constants (γ, K1, K2, K, C_k) that parameterize every
//!   schedule and signed-margin certificates for the inequalities they rest on.
//! - [`descent`]: the fractional descent operators, the step-size schedules
//!   with their contraction factors, and [`descent::run_descent`].
//! - [`quadratic`]: the closed-form operator `A'x + b'` on quadratics and the
//!   condition-number comparison against plain gradient descent.
//! - [`catalog`]: analytic test functions with known smoothness constants.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod caputo;
pub mod catalog;
pub mod descent;
mod error;
pub mod oracle;
pub mod quadratic;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
