use std::path::PathBuf;

use crate::expr::ExprError;
use crate::picard::Solution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{function}: argument {value} outside the domain ({requirement})")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("{what} did not converge within {budget} terms")]
    SeriesBudget { what: &'static str, budget: usize },

    #[error("quadrature rule built for exponents (p={rule_p}, q={rule_q}) but the kernel needs (p={want_p}, q={want_q})")]
    RuleMismatch {
        rule_p: f64,
        rule_q: f64,
        want_p: f64,
        want_q: f64,
    },

    #[error("point {s} lies outside the mesh span [{lo}, {hi}]")]
    OutOfRange { s: f64, lo: f64, hi: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid numerics: {0}")]
    InvalidNumerics(String),

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("right-hand side failed at t = {t}, x = {x}: {source}")]
    RhsDomain {
        t: f64,
        x: f64,
        #[source]
        source: ExprError,
    },

    #[error("Lipschitz estimate is zero: the right-hand side does not depend on x")]
    DegenerateLipschitz,

    #[error("iterate {iteration} left the tube E at t = {t}: |y - x0| = {deviation} > b = {b}")]
    Confinement {
        iteration: usize,
        t: f64,
        deviation: f64,
        b: f64,
    },

    #[error("Picard iteration stopped after {iterations} steps without meeting tol (last sup-difference {last_diff:e}, a-priori tail {tail:e})")]
    NotConverged {
        iterations: usize,
        last_diff: f64,
        tail: f64,
        partial: Box<Solution>,
    },

    #[error("finite-difference stencil at t = {t} is too close to the endpoint a = {a}")]
    Stencil { t: f64, a: f64 },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotConverged { .. } => 2,
            Error::Confinement { .. } => 3,
            Error::RhsDomain { .. } => 4,
            _ => 1,
        }
    }

    pub(crate) fn domain(function: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            function,
            value,
            requirement,
        }
    }
}
