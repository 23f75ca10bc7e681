//! Self-checks against independent oracles.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::parse_str;
use crate::operators::{caputo, hilfer, rl_derivative, rl_integral, PowerWeighted};
use crate::picard::{
    phi0, picard_step, solve, solver_rule, KnownConstants, Problem, ProblemParams, SolveConfig,
};
use crate::quadrature::{JacobiRule, Mesh};
use crate::special::{beta, gamma, gamma_limit, mittag_leffler2};

use super::io_err;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    All,
    Gamma,
    Operators,
    Quadrature,
    Oracle,
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all" => Ok(Self::All),
            "gamma" => Ok(Self::Gamma),
            "operators" => Ok(Self::Operators),
            "quadrature" => Ok(Self::Quadrature),
            "oracle" => Ok(Self::Oracle),
            _ => Err(format!(
                "unknown selector {s:?}; use all, gamma, operators, quadrature or oracle"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(
        suite: &'static str,
        name: impl Into<String>,
        measured: f64,
        threshold: f64,
    ) -> Self {
        Self {
            suite,
            name: name.into(),
            measured,
            threshold,
            pass: measured <= threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<5} {:<11} {:<52} {:>10.3e} <= {:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.measured,
            self.threshold
        )
    }
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn gamma_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for x in [0.5, 1.5, 3.7] {
        let g = gamma(x)?;
        let errs = [100u64, 1_000, 10_000, 100_000]
            .iter()
            .map(|&m| Ok(rel(gamma_limit(x, m)?, g)))
            .collect::<Result<Vec<_>>>()?;
        for (m, e) in [100, 1_000, 10_000, 100_000].iter().zip(&errs) {
            out.push(Check {
                suite: "gamma",
                name: format!("limit x={x} m={m}"),
                measured: *e,
                threshold: f64::NAN,
                pass: true,
            });
        }
        let monotone = errs.windows(2).all(|w| w[1] < w[0]);
        out.push(Check {
            suite: "gamma",
            name: format!("limit x={x} error decreasing in m"),
            measured: errs[3],
            threshold: 1e-4,
            pass: monotone && errs[3] <= 1e-4,
        });
    }
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let x = 0.1 + i as f64 * 0.997;
        worst = worst.max(rel(gamma(x + 1.0)?, x * gamma(x)?));
    }
    out.push(Check::at_most(
        "gamma",
        "recurrence G(x+1) = x G(x)",
        worst,
        1e-12,
    ));
    Ok(out)
}

fn quadrature_checks() -> Result<Vec<Check>> {
    let (p, q) = (-0.5, -1.0 / 3.0);
    let rule = JacobiRule::new(p, q, 40)?;
    let mut worst: f64 = 0.0;
    for j in 0..80 {
        let got = rule.integrate(|u| u.powi(j));
        worst = worst.max(rel(got, beta(p + 1.0, q + j as f64 + 1.0)?));
    }
    let mut out = vec![Check::at_most(
        "quadrature",
        "moments u^j, j<=79, (p,q)=(-1/2,-1/3), n=40",
        worst,
        1e-10,
    )];
    let legendre = JacobiRule::new(0.0, 0.0, 12)?;
    out.push(Check::at_most(
        "quadrature",
        "Legendre weights sum to 1",
        (legendre.weights().iter().sum::<f64>() - 1.0).abs(),
        1e-14,
    ));
    let power = JacobiRule::with_power(p, q, 32, 5.0 / 12.0)?;
    let mut worst: f64 = 0.0;
    for m in 0..6 {
        let e = m as f64 * 5.0 / 12.0;
        worst = worst.max(rel(
            power.integrate(|u| u.powf(e)),
            beta(p + 1.0, q + e + 1.0)?,
        ));
    }
    out.push(Check::at_most(
        "quadrature",
        "substituted rule, moments u^(5m/12), m<=5",
        worst,
        1e-12,
    ));
    Ok(out)
}

fn operator_checks() -> Result<Vec<Check>> {
    const NODES: usize = 24;
    let (a, t) = (0.0, 0.5);
    let mut out = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        // a = 0 throughout
        let sq = PowerWeighted::<fn(f64) -> f64>::smooth(|s| s * s);
        let dsq = PowerWeighted::<fn(f64) -> f64>::smooth(|s| 2.0 * s);
        let ex = PowerWeighted::<fn(f64) -> f64>::smooth(f64::exp);
        let dex = ex;
        for (label, f, df) in [("(s-a)^2", &sq, &dsq), ("exp(s-a)", &ex, &dex)] {
            let rl = rl_derivative(f, a, t, alpha, NODES)?;
            let h0 = hilfer(f, a, t, alpha, 0.0, NODES)?;
            out.push(Check::at_most(
                "operators",
                format!("hilfer(b=0) vs RL, f={label}, alpha={alpha}"),
                (h0 - rl).abs(),
                1e-5,
            ));
            let c = caputo(df, a, t, alpha, NODES)?;
            let h1 = hilfer(f, a, t, alpha, 1.0, NODES)?;
            out.push(Check::at_most(
                "operators",
                format!("hilfer(b=1) vs Caputo, f={label}, alpha={alpha}"),
                (h1 - c).abs(),
                1e-5,
            ));
        }
        let want = gamma(3.0)? / gamma(3.0 - alpha)? * t.powf(2.0 - alpha);
        let got = rl_derivative(&sq, a, t, alpha, NODES)?;
        out.push(Check::at_most(
            "operators",
            format!("RL derivative of (s-a)^2, alpha={alpha}"),
            (got - want).abs(),
            1e-6,
        ));
        let gw = alpha + 0.5 * (1.0 - alpha);
        let kernel = PowerWeighted::new(gw - 1.0, |_| 1.0);
        out.push(Check::at_most(
            "operators",
            format!("hilfer(b=1/2) of (s-a)^(gamma-1), alpha={alpha}"),
            hilfer(&kernel, a, t, alpha, 0.5, NODES)?.abs(),
            1e-8,
        ));
    }
    // I^{1/2} I^{1/2} s^2 = I^1 s^2 = t^3/3
    let half = JacobiRule::new(-0.5, 0.0, NODES)?;
    let half_q = JacobiRule::new(-0.5, 0.5, NODES)?;
    let inner = |s: f64| {
        let f = PowerWeighted::smooth(|z: f64| z * z);
        rl_integral(&f, 0.0, s, 0.5, &half).unwrap_or(f64::NAN) / s.sqrt()
    };
    // I^{1/2} s^2 = c s^{5/2}, so the outer integrand is s^{1/2} times a regular part
    let got = rl_integral(&PowerWeighted::new(0.5, inner), 0.0, 1.0, 0.5, &half_q)?;
    out.push(Check::at_most(
        "operators",
        "semigroup I^(1/2) I^(1/2) s^2 = 1/3 at t=1",
        (got - 1.0 / 3.0).abs(),
        1e-8,
    ));
    Ok(out)
}

/// `f = x` with `k = γ-1`, whose exact constants on `l = 0.5` are `M = 51`, `A = 1`.
pub(crate) fn linear_problem() -> Problem {
    let params = ProblemParams {
        a: 0.0,
        alpha: 0.5,
        beta: 0.5,
        x0: 1.0,
        h: 0.5,
        b: 50.0,
        k: -0.25,
    };
    Problem::new(params, parse_str("x").expect("parses")).expect("valid")
}

fn oracle_checks() -> Result<Vec<Check>> {
    let p = linear_problem();
    let gw = p.gamma_w();
    let known = KnownConstants {
        m: Some(51.0),
        a: Some(1.0),
    };
    let cfg = SolveConfig {
        n: 128,
        quad_nodes: 64,
        tol: 1e-10,
        ..SolveConfig::default()
    };
    let sol = solve(&p, known, &cfg)?;
    let g = gamma(gw)?;
    let mut worst: f64 = 0.0;
    for (t, y) in sol.mesh.points().iter().zip(&sol.y) {
        let want = g * mittag_leffler2(0.5, gw, t.sqrt(), 1e-17)?;
        worst = worst.max((y - want).abs());
    }
    let mut out = vec![
        Check::at_most(
            "oracle",
            format!("linear solve vs Mittag-Leffler, l={}", sol.l_used),
            worst,
            1e-6,
        ),
        Check::at_most(
            "oracle",
            "linear solve residual_sup",
            sol.residual_sup,
            1e-6,
        ),
    ];
    let rule = solver_rule(&p, 64)?;
    let mesh = Arc::new(Mesh::new(0.0, 0.5, 128, 2.0)?);
    let mut it = phi0(&p, mesh);
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        it = picard_step(&p, &it, &rule)?;
        for (t, y) in it.mesh.points().iter().zip(&it.y) {
            let series: f64 = (0..=n)
                .map(|j| Ok(g / gamma(gw + j as f64 * 0.5)? * t.powf(j as f64 * 0.5)))
                .sum::<Result<f64>>()?;
            worst = worst.max((y - series).abs());
        }
    }
    out.push(Check::at_most(
        "oracle",
        "iterates n<=5 vs truncated series",
        worst,
        1e-7,
    ));
    Ok(out)
}

pub fn run_checks(sel: Selector) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    if matches!(sel, Selector::All | Selector::Gamma) {
        out.extend(gamma_checks()?);
    }
    if matches!(sel, Selector::All | Selector::Quadrature) {
        out.extend(quadrature_checks()?);
    }
    if matches!(sel, Selector::All | Selector::Operators) {
        out.extend(operator_checks()?);
    }
    if matches!(sel, Selector::All | Selector::Oracle) {
        out.extend(oracle_checks()?);
    }
    Ok(out)
}

/// Print the table; fails with status 1 if any check fails.
pub fn cmd_verify(sel: Selector, w: &mut dyn Write) -> Result<()> {
    let checks = run_checks(sel)?;
    for c in &checks {
        if c.threshold.is_nan() {
            writeln!(
                w,
                "      {:<11} {:<52} {:>10.3e}",
                c.suite, c.name, c.measured
            )
        } else {
            writeln!(w, "{c}")
        }
        .map_err(io_err)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(w, "{} checks, {} failed", checks.len(), failed).map_err(io_err)?;
    if failed > 0 {
        return Err(Error::InvalidNumerics(format!(
            "{failed} verification checks failed"
        )));
    }
    Ok(())
}
