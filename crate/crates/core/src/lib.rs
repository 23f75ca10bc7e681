//! Solver for singular Hilfer fractional initial value problems
//!
//! ```text
//! D^{α,β}_{a+} x(t) = f(t, x(t)),   lim_{t→a+} (t-a)^{1-γ} x(t) = x0
//! ```
//!
//! by Picard successive approximation in the weighted variable
//! `y = (t-a)^{1-γ} x`, with `γ = α + β(1-α)`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod expr;
pub mod operators;
pub mod picard;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
