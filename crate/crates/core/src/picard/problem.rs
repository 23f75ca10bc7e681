use std::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::special::{log_beta, log_gamma};

/// Scalar data of the initial value problem
/// `D^{α,β} x = f(t, x)`, `lim (t-a)^{1-γ} x(t) = x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub a: f64,
    pub alpha: f64,
    /// Type parameter of the Hilfer derivative.
    pub beta: f64,
    /// Weighted initial value.
    pub x0: f64,
    /// Horizon: the problem is posed on `(a, a+h]`.
    pub h: f64,
    /// Radius of the tube `E = {|(t-a)^{1-γ}x - x0| <= b}`.
    pub b: f64,
    /// Singularity exponent in `|f| <= M (t-a)^k`.
    pub k: f64,
}

/// Exponents derived from `α` and `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// `γ = α + β(1-α)`.
    pub gamma_w: f64,
    /// `μ = 1 - β(1-α)`.
    pub mu: f64,
}

pub fn derive_params(p: &ProblemParams) -> Params {
    let tail = p.beta * (1.0 - p.alpha);
    Params {
        gamma_w: p.alpha + tail,
        mu: 1.0 - tail,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    params: ProblemParams,
    rhs: Expr,
    derived: Params,
}

impl Problem {
    pub fn new(params: ProblemParams, rhs: Expr) -> Result<Self> {
        let ProblemParams {
            a,
            alpha,
            beta,
            x0,
            h,
            b,
            k,
        } = params;
        let bad = |msg: String| Err(Error::InvalidProblem(msg));
        for (name, v) in [("a", a), ("x0", x0), ("k", k)] {
            if !v.is_finite() {
                return bad(format!("{name} = {v} is not finite"));
            }
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return bad(format!("alpha = {alpha} must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&beta) {
            return bad(format!("beta = {beta} must lie in [0, 1]"));
        }
        if !(h > 0.0) || !h.is_finite() {
            return bad(format!("h = {h} must be positive"));
        }
        if !(b > 0.0) || !b.is_finite() {
            return bad(format!("b = {b} must be positive"));
        }
        let derived = derive_params(&params);
        if !(derived.mu + k > 0.0) {
            return bad(format!(
                "k = {k} must exceed beta(1-alpha) - 1 = {}",
                -derived.mu
            ));
        }
        Ok(Self {
            params,
            rhs,
            derived,
        })
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn gamma_w(&self) -> f64 {
        self.derived.gamma_w
    }

    pub fn mu(&self) -> f64 {
        self.derived.mu
    }

    /// `μ + k = α + k + 1 - γ`: the exponent gained by each Picard step.
    pub fn gain(&self) -> f64 {
        self.derived.mu + self.params.k
    }

    /// Exponent of the variable `σ = (t-a)^power` in which iterates are
    /// interpolated and the solver's quadrature is tuned.
    pub fn interp_power(&self) -> f64 {
        self.gain().min(1.0)
    }

    /// Bounds of the tube in the weighted variable, `[x0 - b, x0 + b]`.
    pub fn tube(&self) -> (f64, f64) {
        (
            self.params.x0 - self.params.b,
            self.params.x0 + self.params.b,
        )
    }

    /// Raw right-hand side `f(t, x)`.
    pub fn rhs_at(&self, t: f64, x: f64) -> Result<f64> {
        self.rhs
            .eval(t, x)
            .map_err(|source| Error::RhsDomain { t, x, source })
    }

    /// `(t-a)^{-k} f(t, (t-a)^{γ-1} y)`: the bounded integrand seen by the
    /// quadrature when the state is the weighted value `y`.
    pub fn weighted_rhs(&self, t: f64, y: f64) -> Result<f64> {
        self.weighted_rhs_offset(t - self.params.a, y)
    }

    /// [`Self::weighted_rhs`] at `t = a + tau`, with the weights formed from
    /// `tau` itself. When `a + tau` rounds back to `a`, `f` is evaluated at
    /// the next representable time instead.
    pub fn weighted_rhs_offset(&self, tau: f64, y: f64) -> Result<f64> {
        let a = self.params.a;
        let t = (a + tau).max(a.next_up());
        let x = tau.powf(self.derived.gamma_w - 1.0) * y;
        Ok(tau.powf(-self.params.k) * self.rhs_at(t, x)?)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        write!(
            f,
            "D^({}, {}) x = {} on ({}, {}], (t-a)^(1-gamma) x -> {}",
            p.alpha,
            p.beta,
            self.rhs,
            p.a,
            p.a + p.h,
            p.x0
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    UserSupplied,
    /// Maximum over a sampling grid: a lower bound of the true supremum.
    SampledEstimate,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::UserSupplied => "user-supplied",
            Provenance::SampledEstimate => "sampled estimate (lower bound of the supremum)",
        })
    }
}

/// The growth bound `M` and Lipschitz constant `A` of the right-hand side.
///
/// `A` is positive except for right-hand sides found to be independent of
/// `x`, where the Picard map is a pure quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypotheses {
    pub m: f64,
    pub a: f64,
    pub m_source: Provenance,
    pub a_source: Provenance,
}

impl Hypotheses {
    pub fn new(m: f64, a: f64, m_source: Provenance, a_source: Provenance) -> Result<Self> {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::InvalidProblem(format!("M = {m} must be >= 0")));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidProblem(format!("A = {a} must be > 0")));
        }
        Ok(Self {
            m,
            a,
            m_source,
            a_source,
        })
    }

    pub(crate) fn x_independent(m: f64, m_source: Provenance) -> Self {
        Self {
            m,
            a: 0.0,
            m_source,
            a_source: Provenance::SampledEstimate,
        }
    }

    pub fn is_x_independent(&self) -> bool {
        self.a == 0.0
    }
}

fn time_samples(a: f64, horizon: f64, n_t: usize) -> impl Iterator<Item = f64> {
    (1..=n_t).map(move |i| {
        if i == n_t {
            a + horizon
        } else {
            a + horizon * i as f64 / n_t as f64
        }
    })
}

fn tube_samples(p: &Problem, n_x: usize) -> Vec<f64> {
    let (lo, hi) = p.tube();
    let last = n_x - 1;
    (0..n_x)
        .map(|j| {
            if j == last {
                hi
            } else {
                lo + (hi - lo) * j as f64 / last as f64
            }
        })
        .collect()
}

fn check_grid(n_t: usize, n_x: usize) -> Result<()> {
    if n_t < 1 || n_x < 2 {
        return Err(Error::InvalidNumerics(format!(
            "sampling grid needs n_t >= 1 and n_x >= 2, got {n_t} x {n_x}"
        )));
    }
    Ok(())
}

/// Sampled `max (t-a)^{-k} |f(t, (t-a)^{γ-1} x̂)|` over `t ∈ (a, a+h]` and
/// `x̂ ∈ [x0-b, x0+b]`.
pub fn estimate_m(p: &Problem, n_t: usize, n_x: usize) -> Result<f64> {
    check_grid(n_t, n_x)?;
    let xs = tube_samples(p, n_x);
    let mut best = 0.0f64;
    for t in time_samples(p.params.a, p.params.h, n_t) {
        for &x in &xs {
            best = best.max(p.weighted_rhs(t, x)?.abs());
        }
    }
    Ok(best)
}

/// Sampled `max_x̂ (t-a)^{-k} |f(t, (t-a)^{γ-1} x̂)|` on the single time slice `t`.
pub fn estimate_m_at(p: &Problem, t: f64, n_x: usize) -> Result<f64> {
    check_grid(1, n_x)?;
    if !(t > p.params.a) {
        return Err(Error::domain("estimate_m_at", t, "t > a"));
    }
    let mut best = 0.0f64;
    for x in tube_samples(p, n_x) {
        best = best.max(p.weighted_rhs(t, x)?.abs());
    }
    Ok(best)
}

/// Sampled Lipschitz constant: the largest difference quotient
/// `(t-a)^{-k} |f(t,(t-a)^{γ-1}x̂1) - f(t,(t-a)^{γ-1}x̂2)| / |x̂1 - x̂2|`
/// over `t ∈ (a, a+horizon]` and all sampled pairs `x̂1 ≠ x̂2`.
///
/// Returns [`Error::DegenerateLipschitz`] when every quotient is zero.
pub fn estimate_a(p: &Problem, horizon: f64, n_t: usize, n_x: usize) -> Result<f64> {
    check_grid(n_t, n_x)?;
    if !(horizon > 0.0) {
        return Err(Error::domain("estimate_a", horizon, "horizon > 0"));
    }
    let xs = tube_samples(p, n_x);
    let mut vals = vec![0.0; n_x];
    let mut best = 0.0f64;
    for t in time_samples(p.params.a, horizon, n_t) {
        for (v, &x) in vals.iter_mut().zip(&xs) {
            *v = p.weighted_rhs(t, x)?;
        }
        for i in 0..n_x {
            for j in (i + 1)..n_x {
                let q = (vals[i] - vals[j]).abs() / (xs[j] - xs[i]);
                best = best.max(q);
            }
        }
    }
    if best == 0.0 {
        return Err(Error::DegenerateLipschitz);
    }
    Ok(best)
}

/// Length of the guaranteed existence interval,
/// `min(h, (b Γ(α) / (M B(α, k+1)))^{1/(μ+k)})`, or `h` when `M = 0`.
pub fn compute_l(p: &Problem, m: f64) -> Result<f64> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::InvalidProblem(format!("M = {m} must be >= 0")));
    }
    let ProblemParams { alpha, h, b, k, .. } = p.params;
    if m == 0.0 {
        return Ok(h);
    }
    let log_base = b.ln() + log_gamma(alpha)? - m.ln() - log_beta(alpha, k + 1.0)?;
    Ok(h.min((log_base / p.gain()).exp()))
}
