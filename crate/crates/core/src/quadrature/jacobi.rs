use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::special;

/// Gauss-Jacobi rule on `[0, 1]` for the weight `(1-u)^p u^q`.
///
/// Two families share this type:
///
/// * the classical rule (`power == 1`), exact for polynomials of degree
///   `2n - 1` in `u`;
/// * the power-substituted rule, built by writing `u = v^{1/power}` and
///   running a classical rule in `v`. It is exact-to-rounding for integrands
///   that are polynomials in `u^power`, which is the shape of every Picard
///   iterate in the weighted variable.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    p: f64,
    q: f64,
    power: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl JacobiRule {
    /// Classical Gauss-Jacobi rule with `n` nodes.
    pub fn new(p: f64, q: f64, n: usize) -> Result<Self> {
        check_exponents(p, q, n)?;
        let (nodes, weights) = golub_welsch(p, q, n)?;
        Ok(Self {
            p,
            q,
            power: 1.0,
            nodes,
            weights,
        })
    }

    /// Rule for the same weight, tuned to integrands smooth in `u^power`.
    ///
    /// `power` must lie in `(0, 1]`; `power == 1` gives the classical rule.
    pub fn with_power(p: f64, q: f64, n: usize, power: f64) -> Result<Self> {
        check_exponents(p, q, n)?;
        if !(power > 0.0 && power <= 1.0) {
            return Err(Error::domain(
                "JacobiRule::with_power",
                power,
                "0 < power <= 1",
            ));
        }
        if power == 1.0 {
            return Self::new(p, q, n);
        }
        let rho = 1.0 / power;
        // ∫ (1-u)^p u^q G(u) du = ∫ (1-v)^p v^{ρ(q+1)-1} ρ [(1-v^ρ)/(1-v)]^p G(v^ρ) dv
        let q_v = rho * (q + 1.0) - 1.0;
        let (v_nodes, v_weights) = golub_welsch(p, q_v, n)?;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (&v, &w) in v_nodes.iter().zip(&v_weights) {
            let ln_v = v.ln();
            let one_minus_u = -(rho * ln_v).exp_m1();
            let ratio = one_minus_u / (1.0 - v);
            nodes.push((rho * ln_v).exp());
            weights.push(w * rho * ratio.powf(p));
        }
        Ok(Self {
            p,
            q,
            power,
            nodes,
            weights,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i g(u_i)`, approximating `∫_0^1 (1-u)^p u^q g(u) du`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * g(u))
            .sum()
    }

    /// Fallible variant of [`integrate`](Self::integrate); stops at the first error.
    pub fn try_integrate<F, E>(&self, mut g: F) -> std::result::Result<f64, E>
    where
        F: FnMut(f64) -> std::result::Result<f64, E>,
    {
        let mut sum = 0.0;
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * g(u)?;
        }
        Ok(sum)
    }

    /// True if this rule was built for the kernel `(t-s)^{alpha-1} (s-a)^k`.
    pub fn matches_kernel(&self, alpha: f64, k: f64) -> bool {
        const EXPONENT_TOL: f64 = 1e-12;
        (self.p - (alpha - 1.0)).abs() <= EXPONENT_TOL && (self.q - k).abs() <= EXPONENT_TOL
    }
}

/// Classical Gauss-Jacobi rule on `[0, 1]`.
pub fn jacobi_rule(p: f64, q: f64, n: usize) -> Result<JacobiRule> {
    JacobiRule::new(p, q, n)
}

fn check_exponents(p: f64, q: f64, n: usize) -> Result<()> {
    if !(p > -1.0) || !p.is_finite() {
        return Err(Error::domain("jacobi_rule", p, "p > -1"));
    }
    if !(q > -1.0) || !q.is_finite() {
        return Err(Error::domain("jacobi_rule", q, "q > -1"));
    }
    if n == 0 {
        return Err(Error::domain("jacobi_rule", 0.0, "n >= 1"));
    }
    Ok(())
}

/// Nodes and weights on `[0, 1]` for `(1-u)^p u^q` from the eigen-decomposition
/// of the Jacobi matrix of the shifted Jacobi polynomials.
fn golub_welsch(p: f64, q: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mass = special::beta(p + 1.0, q + 1.0)?;
    if n == 1 {
        // single node at the weight's mean
        return Ok((vec![(q + 1.0) / (p + q + 2.0)], vec![mass]));
    }

    // Recurrence coefficients on [-1, 1] for (1-x)^p (1+x)^q, then u = (1+x)/2.
    let s = p + q;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        let diag = if i == 0 {
            (q - p) / (s + 2.0)
        } else {
            (q * q - p * p) / ((2.0 * fi + s) * (2.0 * fi + s + 2.0))
        };
        jm[(i, i)] = 0.5 * (1.0 + diag);
        if i + 1 < n {
            let m = fi + 1.0;
            let c = 2.0 * m + s;
            // for m = 1 the factor (m+s)/(c-1) is exactly 1; avoids 0/0 when p+q = -1
            let b = if i == 0 {
                4.0 * (1.0 + p) * (1.0 + q) / (c * c * (c + 1.0))
            } else {
                4.0 * m * (m + p) * (m + q) * (m + s) / (c * c * (c + 1.0) * (c - 1.0))
            };
            let off = 0.5 * b.sqrt();
            jm[(i, i + 1)] = off;
            jm[(i + 1, i)] = off;
        }
    }

    let eig = jm.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    if nodes.iter().any(|&u| !(u > 0.0 && u < 1.0)) || nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidNumerics(format!(
            "Jacobi eigen-solve produced degenerate nodes for p={p}, q={q}, n={n}"
        )));
    }
    Ok((nodes, weights))
}

/// `∫_a^t (t-s)^{alpha-1} (s-a)^k g(s) ds` by the substitution `s = a + (t-a)u`.
///
/// Returns `(t-a)^{alpha+k} Σ w_i g(a + (t-a)u_i)`. The rule must have been
/// built with `p = alpha - 1` and `q = k`.
pub fn frac_integral_weighted<F>(
    g: F,
    a: f64,
    t: f64,
    alpha: f64,
    k: f64,
    rule: &JacobiRule,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut g = g;
    check_kernel(rule, alpha, k)?;
    if !(t > a) {
        return Err(Error::domain("frac_integral_weighted", t, "t > a"));
    }
    let len = t - a;
    Ok(len.powf(alpha + k) * rule.integrate(|u| g(a + len * u)))
}

pub(crate) fn check_kernel(rule: &JacobiRule, alpha: f64, k: f64) -> Result<()> {
    if rule.matches_kernel(alpha, k) {
        Ok(())
    } else {
        Err(Error::RuleMismatch {
            rule_p: rule.p,
            rule_q: rule.q,
            want_p: alpha - 1.0,
            want_q: k,
        })
    }
}
