//! Gauss-Jacobi quadrature for the fractional kernel and the meshes the
//! solver lives on.
//!
//! Every fractional integral in the crate reduces, after `s = a + (t-a)u`, to
//! `(t-a)^{α+k} ∫_0^1 (1-u)^{α-1} u^k g(a + (t-a)u) du`, with both endpoint
//! singularities carried by the quadrature weight.

mod jacobi;
mod mesh;

pub(crate) use jacobi::check_kernel;
pub use jacobi::{frac_integral_weighted, jacobi_rule, JacobiRule};
pub use mesh::{interp_eval, make_mesh, InterpOrder, Mesh, PowerInterpolant};
