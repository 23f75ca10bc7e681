//! Numerical Riemann-Liouville, Caputo and Hilfer operators of order in (0,1).
//!
//! Functions are handed over as a regular part times an explicit endpoint
//! power, `f(s) = (s-a)^e r(s)`, so that the power can be absorbed into the
//! Jacobi weight. Derivatives of fractional integrals are taken by central
//! differences with a step proportional to `t-a`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::picard::{apply_picard_map, Problem, Solution, StepOptions, WeightedIterate};
use crate::quadrature::{
    check_kernel, frac_integral_weighted, InterpOrder, JacobiRule, Mesh, PowerInterpolant,
};
use crate::special::gamma;

/// Default relative finite-difference step, as a fraction of `t-a`.
pub const FD_REL_STEP: f64 = 1e-4;

/// `f(s) = (s-a)^exponent · regular(s)`.
#[derive(Clone, Copy)]
pub struct PowerWeighted<F> {
    pub exponent: f64,
    pub regular: F,
}

impl<F: Fn(f64) -> f64> PowerWeighted<F> {
    pub fn new(exponent: f64, regular: F) -> Self {
        Self { exponent, regular }
    }

    /// A function with no endpoint singularity.
    pub fn smooth(regular: F) -> Self {
        Self::new(0.0, regular)
    }

    pub fn eval(&self, a: f64, s: f64) -> f64 {
        let r = (self.regular)(s);
        if self.exponent == 0.0 {
            r
        } else {
            (s - a).powf(self.exponent) * r
        }
    }
}

/// Mesh data stored as `(t-a)^weight · f(t)`.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub mesh: Arc<Mesh>,
    pub values: Vec<f64>,
    pub weight: f64,
    interp: PowerInterpolant,
}

impl SampledFunction {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>, weight: f64, interp_power: f64) -> Result<Self> {
        if values.len() != mesh.points().len() {
            return Err(Error::InvalidNumerics(format!(
                "{} values for {} mesh points",
                values.len(),
                mesh.points().len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidNumerics(format!("non-finite sample {v}")));
        }
        let interp = PowerInterpolant::new(&mesh, interp_power, InterpOrder::Cubic)?;
        Ok(Self {
            mesh,
            values,
            weight,
            interp,
        })
    }

    /// The weighted solution `y` of a solve, as samples of `x = (t-a)^{γ-1} y`.
    pub fn from_solution(sol: &Solution) -> Result<Self> {
        let p = &sol.problem;
        Self::new(
            Arc::clone(&sol.mesh),
            sol.y.clone(),
            1.0 - p.gamma_w(),
            p.interp_power(),
        )
    }

    /// Interpolated `(s-a)^weight f(s)`.
    pub fn regular(&self, s: f64) -> Result<f64> {
        let (lo, hi) = (self.mesh.a(), self.mesh.end());
        if !(s >= lo && s <= hi) {
            return Err(Error::OutOfRange { s, lo, hi });
        }
        Ok(self.interp.eval(&self.values, s))
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        Ok((s - self.mesh.a()).powf(-self.weight) * self.regular(s)?)
    }

    pub fn exponent(&self) -> f64 {
        -self.weight
    }
}

fn check_order(name: &'static str, alpha: f64, upper_open: bool) -> Result<()> {
    let ok = alpha > 0.0 && alpha.is_finite() && (!upper_open || alpha < 1.0);
    if ok {
        Ok(())
    } else {
        let req = if upper_open {
            "0 < alpha < 1"
        } else {
            "alpha > 0"
        };
        Err(Error::domain(name, alpha, req))
    }
}

/// Riemann-Liouville integral `I^alpha f(t)`. The rule must carry the kernel
/// `(1-u)^{alpha-1} u^{f.exponent}`.
pub fn rl_integral<F: Fn(f64) -> f64>(
    f: &PowerWeighted<F>,
    a: f64,
    t: f64,
    alpha: f64,
    rule: &JacobiRule,
) -> Result<f64> {
    check_order("rl_integral", alpha, false)?;
    let v = frac_integral_weighted(&f.regular, a, t, alpha, f.exponent, rule)?;
    Ok(v / gamma(alpha)?)
}

fn stencil(a: f64, t: f64) -> Result<f64> {
    let delta = (t - a) * FD_REL_STEP;
    if !(t > a) || !(delta > 8.0 * f64::EPSILON * t.abs().max(1.0)) {
        return Err(Error::Stencil { t, a });
    }
    Ok(delta)
}

fn central<G: FnMut(f64) -> Result<f64>>(mut g: G, a: f64, t: f64) -> Result<f64> {
    let delta = stencil(a, t)?;
    Ok((g(t + delta)? - g(t - delta)?) / (2.0 * delta))
}

/// Endpoint exponent of `f'` when `f = (s-a)^e r(s)`.
fn derivative_exponent(e: f64) -> Result<f64> {
    // sums like (γ-1) + (1-β)(1-α) vanish only up to rounding
    if e.abs() <= 1e-12 {
        Ok(0.0)
    } else if e > 0.0 {
        Ok(e - 1.0)
    } else {
        Err(Error::domain(
            "derivative_exponent",
            e,
            "endpoint exponent 0 or positive",
        ))
    }
}

/// Riemann-Liouville derivative `D^alpha f(t) = d/dt I^{1-alpha} f(t)`.
pub fn rl_derivative<F: Fn(f64) -> f64>(
    f: &PowerWeighted<F>,
    a: f64,
    t: f64,
    alpha: f64,
    nodes: usize,
) -> Result<f64> {
    check_order("rl_derivative", alpha, true)?;
    let rule = JacobiRule::new(-alpha, f.exponent, nodes)?;
    central(|s| rl_integral(f, a, s, 1.0 - alpha, &rule), a, t)
}

/// Caputo derivative from an analytic derivative `df = f'`.
pub fn caputo<F: Fn(f64) -> f64>(
    df: &PowerWeighted<F>,
    a: f64,
    t: f64,
    alpha: f64,
    nodes: usize,
) -> Result<f64> {
    check_order("caputo", alpha, true)?;
    let rule = JacobiRule::new(-alpha, df.exponent, nodes)?;
    rl_integral(df, a, t, 1.0 - alpha, &rule)
}

/// Caputo derivative with `f'` taken by central differences.
pub fn caputo_numeric<F: Fn(f64) -> f64>(
    f: &PowerWeighted<F>,
    a: f64,
    t: f64,
    alpha: f64,
    nodes: usize,
) -> Result<f64> {
    check_order("caputo", alpha, true)?;
    let q = derivative_exponent(f.exponent)?;
    let rule = JacobiRule::new(-alpha, q, nodes)?;
    let mut failure = None;
    let regular = |s: f64| match central(|z| Ok(f.eval(a, z)), a, s) {
        Ok(d) => d / (s - a).powf(q),
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let v = frac_integral_weighted(regular, a, t, 1.0 - alpha, q, &rule)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(v / gamma(1.0 - alpha)?)
}

/// Hilfer derivative `I^{β(1-α)} d/dt I^{(1-β)(1-α)} f(t)`.
///
/// `beta_type = 0` is the Riemann-Liouville derivative and `beta_type = 1`
/// the Caputo derivative (with a numerically differentiated `f`).
pub fn hilfer<F: Fn(f64) -> f64>(
    f: &PowerWeighted<F>,
    a: f64,
    t: f64,
    alpha: f64,
    beta_type: f64,
    nodes: usize,
) -> Result<f64> {
    check_order("hilfer", alpha, true)?;
    if !(0.0..=1.0).contains(&beta_type) {
        return Err(Error::domain("hilfer", beta_type, "0 <= beta <= 1"));
    }
    let nu = (1.0 - beta_type) * (1.0 - alpha);
    let outer = beta_type * (1.0 - alpha);
    if outer == 0.0 {
        return rl_derivative(f, a, t, alpha, nodes);
    }
    if nu == 0.0 {
        return caputo_numeric(f, a, t, alpha, nodes);
    }

    let inner_rule = JacobiRule::new(nu - 1.0, f.exponent, nodes)?;
    let inner = |s: f64| rl_integral(f, a, s, nu, &inner_rule);
    // I^ν f behaves like (s-a)^{e+ν} near a
    let q = derivative_exponent(f.exponent + nu)?;
    let outer_rule = JacobiRule::new(outer - 1.0, q, nodes)?;
    let mut failure = None;
    let regular = |s: f64| match central(inner, a, s) {
        Ok(d) => d / (s - a).powf(q),
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let v = frac_integral_weighted(regular, a, t, outer, q, &outer_rule)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(v / gamma(outer)?)
}

/// `max_j |y_j - T(y)_j|` where `T` is the integral-equation map evaluated
/// with `rule`.
pub fn iterate_residual(
    p: &Problem,
    it: &WeightedIterate,
    rule: &JacobiRule,
    interp: InterpOrder,
) -> Result<f64> {
    check_kernel(rule, p.params().alpha, p.params().k)?;
    let opts = StepOptions { interp, pool: None };
    let mapped = apply_picard_map(p, it, rule, &opts)?;
    Ok(it
        .y
        .iter()
        .zip(&mapped)
        .map(|(y, m)| (y - m).abs())
        .fold(0.0, f64::max))
}

/// Integral-equation residual of a solution, on a rule with at least twice
/// the solver's node count.
pub fn integral_residual(p: &Problem, sol: &Solution, rule: &JacobiRule) -> Result<f64> {
    let need = 2 * sol.config.quad_nodes;
    if rule.len() < need {
        return Err(Error::InvalidNumerics(format!(
            "verification rule has {} nodes, need at least {need}",
            rule.len()
        )));
    }
    iterate_residual(p, &sol.iterate(), rule, sol.config.interp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol * want.abs().max(1.0),
            "got {got}, want {want}"
        );
    }

    #[test]
    fn integral_of_one() {
        for alpha in [0.3, 0.5, 1.0, 1.7] {
            let rule = JacobiRule::new(alpha - 1.0, 0.0, 4).unwrap();
            let f = PowerWeighted::smooth(|_| 1.0);
            let got = rl_integral(&f, 1.0, 3.0, alpha, &rule).unwrap();
            close(got, 2f64.powf(alpha) / gamma(alpha + 1.0).unwrap(), 1e-13);
        }
    }

    #[test]
    fn integral_of_power() {
        let (alpha, p) = (0.4, -0.3);
        let rule = JacobiRule::new(alpha - 1.0, p, 6).unwrap();
        let f = PowerWeighted::new(p, |_| 1.0);
        let got = rl_integral(&f, 0.0, 2.0, alpha, &rule).unwrap();
        let want = gamma(p + 1.0).unwrap() / gamma(p + alpha + 1.0).unwrap() * 2f64.powf(p + alpha);
        close(got, want, 1e-13);
    }

    #[test]
    fn derivative_of_one() {
        let alpha = 0.5;
        let f = PowerWeighted::smooth(|_| 1.0);
        let t = 0.7;
        let got = rl_derivative(&f, 0.0, t, alpha, 8).unwrap();
        close(got, t.powf(-alpha) / gamma(1.0 - alpha).unwrap(), 1e-7);
    }

    #[test]
    fn derivative_annihilates_kernel_power() {
        let alpha = 0.6;
        let f = PowerWeighted::new(alpha - 1.0, |_| 1.0);
        let got = rl_derivative(&f, 0.0, 0.5, alpha, 8).unwrap();
        assert!(got.abs() < 1e-9, "{got}");
    }

    #[test]
    fn caputo_of_constant_and_line() {
        let f = PowerWeighted::smooth(|_| 0.0);
        assert_eq!(caputo(&f, 0.0, 0.5, 0.3, 4).unwrap(), 0.0);
        let c = PowerWeighted::smooth(|_| 4.0);
        assert!(caputo_numeric(&c, 0.0, 0.5, 0.3, 4).unwrap().abs() < 1e-9);
        let df = PowerWeighted::smooth(|_| 1.0);
        let got = caputo(&df, 0.0, 0.5, 0.3, 4).unwrap();
        close(got, 0.5f64.powf(0.7) / gamma(1.7).unwrap(), 1e-13);
    }

    #[test]
    fn hilfer_of_weight_power_vanishes() {
        let (alpha, beta) = (0.5, 0.5);
        let gamma_w = alpha + beta * (1.0 - alpha);
        let f = PowerWeighted::new(gamma_w - 1.0, |_| 1.0);
        let got = hilfer(&f, 0.0, 0.5, alpha, beta, 16).unwrap();
        assert!(got.abs() < 1e-9, "{got}");
    }

    #[test]
    fn stencil_too_close_to_endpoint() {
        let f = PowerWeighted::smooth(|_| 1.0);
        assert!(matches!(
            rl_derivative(&f, 1.0, 1.0 + 1e-14, 0.5, 4),
            Err(Error::Stencil { .. })
        ));
        assert!(matches!(
            rl_derivative(&f, 1.0, 0.5, 0.5, 4),
            Err(Error::Stencil { .. })
        ));
    }

    #[test]
    fn sampled_function_reconstructs_weighted_power() {
        let mesh = Arc::new(Mesh::new(0.0, 1.0, 32, 2.0).unwrap());
        let values: Vec<f64> = mesh.points().iter().map(|t| 2.0 + t).collect();
        let sf = SampledFunction::new(Arc::clone(&mesh), values, 0.25, 1.0).unwrap();
        let s = 0.37;
        close(sf.eval(s).unwrap(), s.powf(-0.25) * (2.0 + s), 1e-13);
        assert!(sf.regular(1.5).is_err());
        assert!(SampledFunction::new(mesh, vec![1.0], 0.0, 1.0).is_err());
    }
}
