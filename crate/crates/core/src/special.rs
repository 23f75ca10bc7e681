//! Gamma, Beta and Mittag-Leffler functions on the positive reals.
//!
//! `log_gamma` is the production path for every Gamma/Beta value in the
//! crate. It combines a Taylor expansion of `ln Γ(1+z)` around the two zeros
//! of `ln Γ` (so values near `x = 1` and `x = 2` keep their relative accuracy),
//! downward recurrence on `(2.5, 10)` and the Stirling series above.
//!
//! [`gamma_limit`] is the Gauss product `m^x m! / (x(x+1)...(x+m))`. It
//! converges like `O(1/m)` and exists as an independent check on `gamma`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Number of Taylor coefficients kept for `ln Γ(1+z)` on `|z| <= 1/2`.
const TAYLOR_TERMS: usize = 40;

/// Even Bernoulli numbers B_2 .. B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `ζ(k) - 1` for k = 0..TAYLOR_TERMS (entries 0 and 1 unused).
fn zeta_minus_one() -> &'static [f64; TAYLOR_TERMS] {
    static TABLE: OnceLock<[f64; TAYLOR_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Euler-Maclaurin from n = 20; the first omitted correction is below 1e-17.
        const CUT: usize = 20;
        let mut table = [0.0; TAYLOR_TERMS];
        for (k, slot) in table.iter_mut().enumerate().skip(2) {
            let s = k as f64;
            let head: f64 = (2..CUT).rev().map(|n| (n as f64).powf(-s)).sum();
            let n = CUT as f64;
            let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
            // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * n^{-s-2j+1}
            let mut rising = s;
            let mut factorial = 2.0;
            let mut power = n.powf(-s - 1.0);
            for (j, b) in BERNOULLI.iter().take(5).enumerate() {
                tail += b / factorial * rising * power;
                let j2 = 2.0 * (j as f64 + 1.0);
                rising *= (s + j2 - 1.0) * (s + j2);
                factorial *= (j2 + 1.0) * (j2 + 2.0);
                power /= n * n;
            }
            *slot = head + tail;
        }
        table
    })
}

/// `ln Γ(1+z)` for `|z| <= 1/2`.
fn log_gamma_1p(z: f64) -> f64 {
    let zeta = zeta_minus_one();
    let mut series = 0.0;
    for k in (2..TAYLOR_TERMS).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        series = series * z + sign * zeta[k] / k as f64;
    }
    // the loop builds Σ c_k z^{k-2}; restore the z^2 factor
    -z.ln_1p() + z * (1.0 - EULER_GAMMA) + series * z * z
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (j as f64 + 1.0);
        corr += b / (n * (n - 1.0)) * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", x, "x > 0"));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        log_gamma_1p(x) - x.ln()
    } else if x <= 1.5 {
        log_gamma_1p(x - 1.0)
    } else if x <= 2.5 {
        let z = x - 2.0;
        z.ln_1p() + log_gamma_1p(z)
    } else if x < 10.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        let z = y - 2.0;
        prod.ln() + z.ln_1p() + log_gamma_1p(z)
    } else {
        stirling(x)
    }
}

/// Euler's Gamma function, `exp(ln Γ(x))`.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

/// `ln B(x, y)`.
pub fn log_beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("beta", x, "x > 0"));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain("beta", y, "y > 0"));
    }
    Ok(log_gamma_unchecked(x) + log_gamma_unchecked(y) - log_gamma_unchecked(x + y))
}

/// Euler's Beta function via `Γ(x)Γ(y)/Γ(x+y)` in log space.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    log_beta(x, y).map(f64::exp)
}

/// The m-th Gauss product `m^x m! / (x(x+1)...(x+m))`, which tends to `Γ(x)`.
///
/// Accumulated as `x ln m - ln x - Σ_{j=1}^m ln(1 + x/j)` so that `m` up to
/// 1e6 and beyond never overflows.
pub fn gamma_limit(x: f64, m: u64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("gamma_limit", x, "x > 0"));
    }
    if m == 0 {
        return Err(Error::domain("gamma_limit", 0.0, "m >= 1"));
    }
    let mut log_sum = 0.0;
    // small terms first
    for j in (1..=m).rev() {
        log_sum += (x / j as f64).ln_1p();
    }
    Ok((x * (m as f64).ln() - x.ln() - log_sum).exp())
}

/// Maximum number of series terms tried by [`mittag_leffler2`].
pub const MITTAG_LEFFLER_BUDGET: usize = 10_000;

/// Two-parameter Mittag-Leffler function `E_{α,β}(z) = Σ z^j / Γ(αj + β)`.
///
/// Summed directly until the omitted tail is bounded by `tol` in absolute
/// terms.
pub fn mittag_leffler2(alpha: f64, beta_param: f64, z: f64, tol: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain("mittag_leffler2", alpha, "alpha > 0"));
    }
    if !(beta_param > 0.0) {
        return Err(Error::domain("mittag_leffler2", beta_param, "beta > 0"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("mittag_leffler2", tol, "tol > 0"));
    }
    if !z.is_finite() {
        return Err(Error::domain("mittag_leffler2", z, "finite z"));
    }
    let first = 1.0 / gamma(beta_param)?;
    if z == 0.0 {
        return Ok(first);
    }
    let log_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = first;
    let mut prev_log = -log_gamma_unchecked(beta_param);
    for j in 1..MITTAG_LEFFLER_BUDGET {
        let jf = j as f64;
        let log_term = jf * log_abs_z - log_gamma_unchecked(alpha * jf + beta_param);
        let magnitude = log_term.exp();
        // log term is concave in j, so the term ratio only falls from here
        // and the tail is at most magnitude / (1 - ratio)
        if log_term < prev_log {
            let ratio = (log_term - prev_log).exp();
            if magnitude < tol * (1.0 - ratio) {
                return Ok(sum);
            }
        }
        sum += if negative && j % 2 == 1 {
            -magnitude
        } else {
            magnitude
        };
        prev_log = log_term;
    }
    Err(Error::SeriesBudget {
        what: "Mittag-Leffler series",
        budget: MITTAG_LEFFLER_BUDGET,
    })
}
