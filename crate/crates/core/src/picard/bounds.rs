//! A-priori bounds on successive weighted Picard differences.
//!
//! With `D_n` the bound on `sup (t-a)^{1-γ}|φ_n - φ_{n-1}|`:
//!
//! ```text
//! D_1     = M l^{μ+k} B(α, k+1) / Γ(α)
//! D_{i+1} = D_i · A l^{μ+k} B(α, k+1+i(μ+k)) / Γ(α)
//! ```
//!
//! so `bound_u(n) = D_{n+2}` and `ratio_u(n) = D_{n+3}/D_{n+2}`. Everything
//! is accumulated in log space.

use crate::error::{Error, Result};
use crate::special::{log_beta, log_gamma};

use super::Problem;

/// Threshold below which the remaining tail is bounded geometrically.
const GEOMETRIC_SWITCH: f64 = 0.5;

/// Hard cap on explicitly summed tail terms.
const TAIL_TERM_CAP: usize = 1_000_000;

fn check(l: f64, consts: &[(&'static str, f64)]) -> Result<()> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::domain("bound", l, "l > 0"));
    }
    for &(name, v) in consts {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::domain(name, v, "nonnegative constant"));
        }
    }
    Ok(())
}

/// `ln(A l^{μ+k} B(α, k+1+i(μ+k)) / Γ(α))`, the log of `D_{i+1}/D_i`.
fn log_factor(p: &Problem, a: f64, l: f64, i: usize) -> Result<f64> {
    let alpha = p.params().alpha;
    let gain = p.gain();
    let z = p.params().k + 1.0 + i as f64 * gain;
    if !(z > 0.0) {
        return Err(Error::domain("ratio_u", z, "positive Gamma argument"));
    }
    Ok(a.ln() + gain * l.ln() + log_beta(alpha, z)? - log_gamma(alpha)?)
}

fn log_first(p: &Problem, m: f64, l: f64) -> Result<f64> {
    let alpha = p.params().alpha;
    Ok(m.ln() + p.gain() * l.ln() + log_beta(alpha, p.params().k + 1.0)? - log_gamma(alpha)?)
}

/// `ln D_n` for `n >= 1`.
fn log_d(p: &Problem, m: f64, a: f64, l: f64, n: usize) -> Result<f64> {
    let mut acc = log_first(p, m, l)?;
    for i in 1..n {
        acc += log_factor(p, a, l, i)?;
    }
    Ok(acc)
}

/// Bound on `|y_1 - y_0|`: `M l^{μ+k} B(α, k+1) / Γ(α)`.
pub fn bound_u0(p: &Problem, m: f64, l: f64) -> Result<f64> {
    check(l, &[("M", m)])?;
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(log_first(p, m, l)?.exp())
}

/// `A^{n+1} M l^{(n+2)(μ+k)} Π_{i=0}^{n+1} B(α, (i+1)k + i(α+1-γ) + 1) / Γ(α)`,
/// the bound on `sup (t-a)^{1-γ}|φ_{n+2} - φ_{n+1}|`.
pub fn bound_u(p: &Problem, m: f64, a: f64, l: f64, n: usize) -> Result<f64> {
    check(l, &[("M", m), ("A", a)])?;
    if m == 0.0 || a == 0.0 {
        return Ok(0.0);
    }
    Ok(log_d(p, m, a, l, n + 2)?.exp())
}

/// `u_{n+1}/u_n = A l^{μ+k} Γ(z) / Γ(z+α)` with `z = (n+3)k + (n+2)(α+1-γ) + 1`.
pub fn ratio_u(p: &Problem, a: f64, l: f64, n: usize) -> Result<f64> {
    check(l, &[("A", a)])?;
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(log_factor(p, a, l, n + 2)?.exp())
}

/// Bound `D_n` on the `n`-th weighted difference `d_n`, `n >= 1`.
pub fn difference_bound(p: &Problem, m: f64, a: f64, l: f64, n: usize) -> Result<f64> {
    match n {
        0 => Err(Error::domain("difference_bound", 0.0, "n >= 1")),
        1 => bound_u0(p, m, l),
        _ => bound_u(p, m, a, l, n - 2),
    }
}

/// `D_{n+1}/D_n` for `n >= 1`.
pub fn difference_ratio(p: &Problem, a: f64, l: f64, n: usize) -> Result<f64> {
    check(l, &[("A", a)])?;
    if n == 0 {
        return Err(Error::domain("difference_ratio", 0.0, "n >= 1"));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(log_factor(p, a, l, n)?.exp())
}

/// Bound on the remaining distance `sup |y_∞ - y_n| <= Σ_{j>n} D_j`.
///
/// Terms are summed until `D_{j+1}/D_j < 1/2`; since the ratios decrease in
/// `j`, the rest is bounded by `D_j r/(1-r)`.
pub fn tail_bound(p: &Problem, m: f64, a: f64, l: f64, n: usize) -> Result<f64> {
    check(l, &[("M", m), ("A", a)])?;
    if m == 0.0 {
        return Ok(0.0);
    }
    if a == 0.0 {
        // only D_1 is nonzero
        return if n == 0 { bound_u0(p, m, l) } else { Ok(0.0) };
    }
    let mut log_dj = log_d(p, m, a, l, n + 1)?;
    let mut acc = f64::NEG_INFINITY;
    for j in (n + 1)..(n + 1 + TAIL_TERM_CAP) {
        acc = log_add(acc, log_dj);
        let log_r = log_factor(p, a, l, j)?;
        let r = log_r.exp();
        if r < GEOMETRIC_SWITCH {
            acc = log_add(acc, log_dj + (r / (1.0 - r)).ln());
            return Ok(acc.exp());
        }
        log_dj += log_r;
    }
    Ok(f64::INFINITY)
}

fn log_add(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let hi = x.max(y);
    hi + (-(x - y).abs()).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_str;
    use crate::picard::ProblemParams;

    fn example_problem() -> Problem {
        Problem::new(
            ProblemParams {
                a: 0.0,
                alpha: 0.5,
                beta: 0.5,
                x0: 3.0,
                h: 10.0,
                b: 8.0,
                k: -1.0 / 3.0,
            },
            parse_str("t^(-1/3)*(1 + t*(x^4)^(1/3))").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn first_bound_matches_closed_form() {
        let p = example_problem();
        let (m, l): (f64, f64) = (25.0, 0.02);
        let want = m * l.powf(5.0 / 12.0) * crate::special::beta(0.5, 2.0 / 3.0).unwrap()
            / crate::special::gamma(0.5).unwrap();
        assert!((bound_u0(&p, m, l).unwrap() / want - 1.0).abs() < 1e-13);
    }

    #[test]
    fn zero_constants() {
        let p = example_problem();
        for n in 0..5 {
            assert_eq!(bound_u(&p, 3.0, 0.0, 0.1, n).unwrap(), 0.0);
            assert_eq!(ratio_u(&p, 0.0, 0.1, n).unwrap(), 0.0);
        }
        assert_eq!(tail_bound(&p, 0.0, 2.0, 0.1, 3).unwrap(), 0.0);
    }

    #[test]
    fn ratio_identity() {
        let p = example_problem();
        for n in 0..=30 {
            let lhs = ratio_u(&p, 2.0, 0.3, n).unwrap() * bound_u(&p, 5.0, 2.0, 0.3, n).unwrap();
            let rhs = bound_u(&p, 5.0, 2.0, 0.3, n + 1).unwrap();
            assert!((lhs / rhs - 1.0).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn tail_bounds_partial_sums() {
        let p = example_problem();
        let (m, a, l) = (4.0, 1.5, 0.2);
        for n in [0, 1, 3, 8] {
            let tail = tail_bound(&p, m, a, l, n).unwrap();
            let explicit: f64 = ((n + 1)..(n + 200))
                .map(|j| difference_bound(&p, m, a, l, j).unwrap())
                .sum();
            assert!(
                tail >= explicit * (1.0 - 1e-12),
                "n={n}: {tail} < {explicit}"
            );
            assert!(tail <= explicit * 1.5 + 1e-300);
        }
    }

    #[test]
    fn huge_products_stay_finite_in_log_space() {
        let p = example_problem();
        // A^{n+1} alone overflows and l^{(n+2)(μ+k)} alone underflows
        let a: f64 = 1e4;
        let l = a.powf(-1.0 / p.gain());
        let u = bound_u(&p, 1.0, a, l, 200).unwrap();
        assert!(u.is_finite() && u > 0.0, "{u}");
        let tail = tail_bound(&p, 25.0, 50.0, 1.0, 0).unwrap();
        assert!(tail > 1e100);
    }
}
