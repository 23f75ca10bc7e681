//! Picard successive approximation for the Hilfer initial value problem.
//!
//! The state is always the weighted function `y = (t-a)^{1-γ} x`, which is
//! continuous and bounded on `[a, a+l]` while `x` itself blows up at `a`. Each
//! step evaluates the equivalent Volterra integral equation
//!
//! ```text
//! y(t) = x0 + (t-a)^{1-γ} / Γ(α) ∫_a^t (t-s)^{α-1} f(s, (s-a)^{γ-1} y(s)) ds
//! ```
//!
//! at every mesh point and refuses iterates that leave the tube
//! `|y - x0| <= b`.

mod bounds;
mod problem;
mod solver;

pub use bounds::{bound_u, bound_u0, difference_bound, difference_ratio, ratio_u, tail_bound};
pub use problem::{
    compute_l, derive_params, estimate_a, estimate_m, estimate_m_at, Hypotheses, Params, Problem,
    ProblemParams, Provenance,
};
pub(crate) use solver::apply_picard_map;
pub use solver::{
    phi0, picard_step, picard_step_with, resolve_constants, solve, solver_rule, IterationRecord,
    IterationReport, KnownConstants, Solution, SolveConfig, StepOptions, WeightedIterate,
};
