use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::integral_residual;
use crate::quadrature::{check_kernel, InterpOrder, JacobiRule, Mesh, PowerInterpolant};
use crate::special::gamma;

use super::bounds::{difference_bound, difference_ratio, tail_bound};
use super::problem::{compute_l, estimate_a, estimate_m, Hypotheses, Problem, Provenance};

/// Mesh values of `y_n(t) = (t-a)^{1-γ} φ_n(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedIterate {
    pub mesh: Arc<Mesh>,
    pub y: Vec<f64>,
    pub n: usize,
}

impl WeightedIterate {
    /// `max_j |y_j - x0|`.
    pub fn deviation(&self, x0: f64) -> f64 {
        self.y.iter().map(|v| (v - x0).abs()).fold(0.0, f64::max)
    }

    /// `max_j |y_j - other_j|`; both iterates must share the mesh.
    pub fn sup_diff(&self, other: &WeightedIterate) -> f64 {
        self.y
            .iter()
            .zip(&other.y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `φ_0 = x0 (t-a)^{γ-1}`, which is the constant `x0` in the weighted variable.
pub fn phi0(p: &Problem, mesh: impl Into<Arc<Mesh>>) -> WeightedIterate {
    let mesh = mesh.into();
    let y = vec![p.params().x0; mesh.points().len()];
    WeightedIterate { mesh, y, n: 0 }
}

/// Knobs of a single Picard application.
#[derive(Clone, Copy, Default)]
pub struct StepOptions<'a> {
    pub interp: InterpOrder,
    /// Pool for evaluating mesh points concurrently; `None` runs inline.
    pub pool: Option<&'a ThreadPool>,
}

/// The Picard map applied to `prev`, without the confinement check.
///
/// `y_j = x0 + (t_j-a)^{μ+k}/Γ(α) · Σ_i w_i g(a + (t_j-a)u_i)` where
/// `g(s) = (s-a)^{-k} f(s, (s-a)^{γ-1} Y(s))` and `Y` interpolates `prev`.
pub(crate) fn apply_picard_map(
    p: &Problem,
    prev: &WeightedIterate,
    rule: &JacobiRule,
    opts: &StepOptions<'_>,
) -> Result<Vec<f64>> {
    let params = p.params();
    check_kernel(rule, params.alpha, params.k)?;
    let mesh = &prev.mesh;
    let interp = PowerInterpolant::new(mesh, p.interp_power(), opts.interp)?;
    let scale = 1.0 / gamma(params.alpha)?;
    let gain = p.gain();
    let a = params.a;
    let x0 = params.x0;
    let prev_y = &prev.y;

    let point = |j: usize| -> Result<f64> {
        let t = mesh.points()[j];
        let len = t - a;
        let sum = rule.try_integrate(|u| {
            let tau = len * u;
            p.weighted_rhs_offset(tau, interp.eval(prev_y, a + tau))
        })?;
        Ok(x0 + len.powf(gain) * scale * sum)
    };

    let n_pts = mesh.points().len();
    let computed: Vec<Result<f64>> = match opts.pool {
        Some(pool) => pool.install(|| (1..n_pts).into_par_iter().map(point).collect()),
        None => (1..n_pts).map(point).collect(),
    };
    let mut y = Vec::with_capacity(n_pts);
    y.push(x0);
    for v in computed {
        y.push(v?);
    }
    Ok(y)
}

/// One Picard step in the weighted variable, rejecting iterates that leave the tube.
pub fn picard_step(
    p: &Problem,
    prev: &WeightedIterate,
    rule: &JacobiRule,
) -> Result<WeightedIterate> {
    picard_step_with(p, prev, rule, &StepOptions::default())
}

pub fn picard_step_with(
    p: &Problem,
    prev: &WeightedIterate,
    rule: &JacobiRule,
    opts: &StepOptions<'_>,
) -> Result<WeightedIterate> {
    let y = apply_picard_map(p, prev, rule, opts)?;
    let params = p.params();
    let n = prev.n + 1;
    for (t, v) in prev.mesh.points().iter().zip(&y) {
        let deviation = (v - params.x0).abs();
        if !(deviation <= params.b) {
            return Err(Error::Confinement {
                iteration: n,
                t: *t,
                deviation,
                b: params.b,
            });
        }
    }
    Ok(WeightedIterate {
        mesh: Arc::clone(&prev.mesh),
        y,
        n,
    })
}

/// Rule used by the solver: the Jacobi weight `(1-u)^{α-1}u^k`, tuned to
/// integrands smooth in `(s-a)^{min(μ+k, 1)}`.
pub fn solver_rule(p: &Problem, nodes: usize) -> Result<JacobiRule> {
    JacobiRule::with_power(
        p.params().alpha - 1.0,
        p.params().k,
        nodes,
        p.interp_power(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Mesh intervals `N`.
    pub n: usize,
    /// Mesh grading exponent `r`.
    pub grading: f64,
    /// Quadrature nodes `Q`.
    pub quad_nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub l_override: Option<f64>,
    pub interp: InterpOrder,
    /// Sampling grid for estimated `M` and `A`.
    pub sample_t: usize,
    pub sample_x: usize,
    /// Worker threads inside a step; 0 runs sequentially.
    pub threads: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            n: 256,
            grading: 2.0,
            quad_nodes: 64,
            tol: 1e-10,
            max_iter: 500,
            l_override: None,
            interp: InterpOrder::Cubic,
            sample_t: 201,
            sample_x: 201,
            threads: 0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidNumerics(m));
        if self.n < 2 {
            return bad(format!("N = {} must be >= 2", self.n));
        }
        if !(self.grading >= 1.0) || !self.grading.is_finite() {
            return bad(format!("r = {} must be >= 1", self.grading));
        }
        if self.quad_nodes < 1 {
            return bad("Q must be >= 1".into());
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol = {} must be positive", self.tol));
        }
        if self.max_iter < 1 {
            return bad("max_iter must be >= 1".into());
        }
        if let Some(l) = self.l_override {
            if !(l > 0.0) || !l.is_finite() {
                return bad(format!("l_override = {l} must be positive"));
            }
        }
        Ok(())
    }
}

/// Optional user-supplied hypothesis constants; missing ones are estimated.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KnownConstants {
    pub m: Option<f64>,
    pub a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    /// `max_j |y^{(n)}_j - y^{(n-1)}_j|`.
    pub sup_diff: f64,
    /// A-priori bound on `sup_diff`.
    pub bound: f64,
    /// Ratio of the next bound to this one.
    pub ratio: f64,
    /// A-priori bound on the distance from this iterate to the limit.
    pub tail: f64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationReport {
    pub records: Vec<IterationRecord>,
}

impl IterationReport {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn total_time(&self) -> Duration {
        self.records.iter().map(|r| r.elapsed).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub problem: Problem,
    pub hypotheses: Hypotheses,
    /// Existence-interval length from the formula with the resolved `M`.
    pub l_computed: f64,
    pub l_used: f64,
    pub mesh: Arc<Mesh>,
    /// Converged weighted values at the mesh points.
    pub y: Vec<f64>,
    /// `x_j = (t_j-a)^{γ-1} y_j`; at `t_0 = a` the signed limit.
    pub x: Vec<f64>,
    pub report: IterationReport,
    pub residual_sup: f64,
    pub converged: bool,
    pub config: SolveConfig,
}

impl Solution {
    pub fn iterate(&self) -> WeightedIterate {
        WeightedIterate {
            mesh: Arc::clone(&self.mesh),
            y: self.y.clone(),
            n: self.report.iterations(),
        }
    }
}

fn reconstruct_x(p: &Problem, mesh: &Mesh, y: &[f64]) -> Vec<f64> {
    let a = p.params().a;
    let expo = p.gamma_w() - 1.0;
    mesh.points()
        .iter()
        .zip(y)
        .map(|(&t, &v)| {
            if t > a {
                (t - a).powf(expo) * v
            } else if expo == 0.0 || v == 0.0 {
                v
            } else {
                v.signum() * f64::INFINITY
            }
        })
        .collect()
}

/// Resolve `M`, the existence interval and `A` as the solver does.
///
/// Returns `(hypotheses, l_computed, l_used)`.
pub fn resolve_constants(
    p: &Problem,
    known: KnownConstants,
    cfg: &SolveConfig,
) -> Result<(Hypotheses, f64, f64)> {
    let (m, m_source) = match known.m {
        Some(m) => (m, Provenance::UserSupplied),
        None => (
            estimate_m(p, cfg.sample_t, cfg.sample_x)?,
            Provenance::SampledEstimate,
        ),
    };
    let l_computed = compute_l(p, m)?;
    let l_used = match cfg.l_override {
        Some(l) if l > l_computed => {
            return Err(Error::InvalidNumerics(format!(
                "l_override = {l} exceeds the guaranteed interval l = {l_computed}"
            )))
        }
        Some(l) => l,
        None => l_computed,
    };
    let hyp = match known.a {
        Some(a) => Hypotheses::new(m, a, m_source, Provenance::UserSupplied)?,
        None => match estimate_a(p, l_used, cfg.sample_t, cfg.sample_x) {
            Ok(a) => Hypotheses::new(m, a, m_source, Provenance::SampledEstimate)?,
            Err(Error::DegenerateLipschitz) => Hypotheses::x_independent(m, m_source),
            Err(e) => return Err(e),
        },
    };
    Ok((hyp, l_computed, l_used))
}

/// Picard iteration from `φ_0` until both the observed sup-difference and the
/// a-priori tail bound are at most `tol`.
pub fn solve(p: &Problem, known: KnownConstants, cfg: &SolveConfig) -> Result<Solution> {
    cfg.validate()?;
    let (hyp, l_computed, l_used) = resolve_constants(p, known, cfg)?;
    let mesh = Arc::new(Mesh::new(p.params().a, l_used, cfg.n, cfg.grading)?);
    let rule = solver_rule(p, cfg.quad_nodes)?;
    let pool = match cfg.threads {
        0 => None,
        n => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidNumerics(format!("thread pool: {e}")))?,
        ),
    };
    let opts = StepOptions {
        interp: cfg.interp,
        pool: pool.as_ref(),
    };

    let mut current = phi0(p, Arc::clone(&mesh));
    let mut report = IterationReport::default();
    let mut converged = false;
    for n in 1..=cfg.max_iter {
        let started = Instant::now();
        let next = picard_step_with(p, &current, &rule, &opts)?;
        let sup_diff = next.sup_diff(&current);
        let bound = difference_bound(p, hyp.m, hyp.a, l_used, n)?;
        let ratio = difference_ratio(p, hyp.a, l_used, n)?;
        let tail = tail_bound(p, hyp.m, hyp.a, l_used, n)?;
        current = next;
        report.records.push(IterationRecord {
            n,
            sup_diff,
            bound,
            ratio,
            tail,
            elapsed: started.elapsed(),
        });
        // an x-independent right-hand side is its own fixed point after one step
        if hyp.is_x_independent() || (sup_diff <= cfg.tol && tail <= cfg.tol) {
            converged = true;
            break;
        }
    }

    let x = reconstruct_x(p, &mesh, &current.y);
    let mut sol = Solution {
        problem: p.clone(),
        hypotheses: hyp,
        l_computed,
        l_used,
        mesh,
        y: current.y,
        x,
        report,
        residual_sup: f64::NAN,
        converged,
        config: cfg.clone(),
    };
    let check_rule = solver_rule(p, 2 * cfg.quad_nodes)?;
    sol.residual_sup = integral_residual(p, &sol, &check_rule)?;
    if !converged {
        let last = sol.report.records.last();
        return Err(Error::NotConverged {
            iterations: sol.report.iterations(),
            last_diff: last.map_or(f64::NAN, |r| r.sup_diff),
            tail: last.map_or(f64::NAN, |r| r.tail),
            partial: Box::new(sol),
        });
    }
    Ok(sol)
}
