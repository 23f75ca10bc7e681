use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Graded mesh `t_j = a + l (j/N)^r` on `[a, a+l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    a: f64,
    l: f64,
    grading: f64,
    points: Vec<f64>,
}

impl Mesh {
    pub fn new(a: f64, l: f64, n: usize, grading: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidNumerics(format!(
                "mesh start {a} is not finite"
            )));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidNumerics(format!(
                "mesh length {l} must be positive"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidNumerics(format!(
                "mesh needs N >= 2, got {n}"
            )));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(Error::InvalidNumerics(format!(
                "mesh grading {grading} must be >= 1"
            )));
        }
        let nf = n as f64;
        let mut points: Vec<f64> = (0..=n)
            .map(|j| a + l * (j as f64 / nf).powf(grading))
            .collect();
        points[0] = a;
        points[n] = a + l;
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidNumerics(format!(
                "mesh with N={n}, r={grading} is not strictly increasing at this scale"
            )));
        }
        Ok(Self {
            a,
            l,
            grading,
            points,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    fn check_span(&self, s: f64) -> Result<()> {
        if s >= self.a && s <= self.end() {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                s,
                lo: self.a,
                hi: self.end(),
            })
        }
    }
}

pub fn make_mesh(a: f64, l: f64, n: usize, grading: f64) -> Result<Mesh> {
    Mesh::new(a, l, n, grading)
}

/// Piecewise-linear interpolant in `t` through `(t_j, values[j])`.
pub fn interp_eval(mesh: &Mesh, values: &[f64], s: f64) -> Result<f64> {
    if values.len() != mesh.points.len() {
        return Err(Error::InvalidNumerics(format!(
            "{} values for {} mesh points",
            values.len(),
            mesh.points.len()
        )));
    }
    mesh.check_span(s)?;
    let pts = &mesh.points;
    let i = (pts.partition_point(|&t| t <= s)).clamp(1, pts.len() - 1) - 1;
    let (t0, t1) = (pts[i], pts[i + 1]);
    if s == t1 {
        return Ok(values[i + 1]);
    }
    let theta = (s - t0) / (t1 - t0);
    Ok(values[i] + theta * (values[i + 1] - values[i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpOrder {
    Linear,
    #[default]
    Cubic,
}

/// Interpolation of mesh data in the variable `σ = (t-a)^power`.
///
/// Weighted Picard iterates are (close to) polynomials in `σ` when `power` is
/// the per-step exponent gain, so interpolating in `σ` rather than `t`
/// removes the endpoint singularity of their `t`-derivatives.
#[derive(Debug, Clone)]
pub struct PowerInterpolant {
    a: f64,
    power: f64,
    order: InterpOrder,
    sigma: Vec<f64>,
}

impl PowerInterpolant {
    pub fn new(mesh: &Mesh, power: f64, order: InterpOrder) -> Result<Self> {
        if !(power > 0.0) {
            return Err(Error::domain("PowerInterpolant", power, "power > 0"));
        }
        let sigma = mesh
            .points
            .iter()
            .map(|&t| (t - mesh.a).powf(power))
            .collect();
        Ok(Self {
            a: mesh.a,
            power,
            order,
            sigma,
        })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn order(&self) -> InterpOrder {
        self.order
    }

    /// Value at `s`; callers guarantee `s` lies in the mesh span.
    pub fn eval(&self, values: &[f64], s: f64) -> f64 {
        debug_assert_eq!(values.len(), self.sigma.len());
        let x = (s - self.a).max(0.0).powf(self.power);
        let sig = &self.sigma;
        let last = sig.len() - 1;
        let i = sig.partition_point(|&v| v <= x).clamp(1, last) - 1;
        match self.order {
            InterpOrder::Linear => {
                let theta = (x - sig[i]) / (sig[i + 1] - sig[i]);
                values[i] + theta * (values[i + 1] - values[i])
            }
            InterpOrder::Cubic => {
                let width = 4.min(sig.len());
                let start = i.saturating_sub(1).min(sig.len() - width);
                lagrange(&sig[start..start + width], &values[start..start + width], x)
            }
        }
    }
}

fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (m, (&xm, &ym)) in xs.iter().zip(ys).enumerate() {
        let mut basis = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if j != m {
                basis *= (x - xj) / (xm - xj);
            }
        }
        acc += basis * ym;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_and_graded_points() {
        let m = make_mesh(0.0, 1.0, 2, 1.0).unwrap();
        assert_eq!(m.points(), &[0.0, 0.5, 1.0]);
        let m = make_mesh(0.0, 1.0, 4, 2.0).unwrap();
        assert_eq!(m.points(), &[0.0, 1.0 / 16.0, 0.25, 9.0 / 16.0, 1.0]);
    }

    #[test]
    fn endpoint_is_exact() {
        let m = make_mesh(0.3, 0.7, 37, 2.3).unwrap();
        assert_eq!(m.end(), 0.3 + 0.7);
        assert_eq!(m.points()[0], 0.3);
    }

    #[test]
    fn invalid_meshes() {
        assert!(make_mesh(0.0, 1.0, 1, 1.0).is_err());
        assert!(make_mesh(0.0, 0.0, 4, 1.0).is_err());
        assert!(make_mesh(0.0, 1.0, 4, 0.5).is_err());
    }

    #[test]
    fn linear_interp_nodes_midpoints_constants() {
        let m = make_mesh(1.0, 2.0, 5, 2.0).unwrap();
        let vals: Vec<f64> = m.points().iter().map(|t| t.sin()).collect();
        for (j, &t) in m.points().iter().enumerate() {
            assert_eq!(interp_eval(&m, &vals, t).unwrap(), vals[j]);
        }
        for j in 0..5 {
            let mid = 0.5 * (m.points()[j] + m.points()[j + 1]);
            let want = 0.5 * (vals[j] + vals[j + 1]);
            assert!((interp_eval(&m, &vals, mid).unwrap() - want).abs() < 1e-15);
        }
        let c = vec![2.5; 6];
        assert_eq!(interp_eval(&m, &c, 2.2).unwrap(), 2.5);
    }

    #[test]
    fn linear_interp_out_of_range() {
        let m = make_mesh(0.0, 1.0, 4, 1.0).unwrap();
        let v = vec![0.0; 5];
        assert!(matches!(
            interp_eval(&m, &v, 1.5),
            Err(Error::OutOfRange { .. })
        ));
        assert!(interp_eval(&m, &v, -0.1).is_err());
    }

    #[test]
    fn cubic_in_sigma_reproduces_cubics() {
        let m = make_mesh(0.0, 0.5, 12, 2.0).unwrap();
        let ip = PowerInterpolant::new(&m, 0.5, InterpOrder::Cubic).unwrap();
        let f = |t: f64| {
            let s = t.sqrt();
            1.0 - 2.0 * s + 0.5 * s * s * s
        };
        let vals: Vec<f64> = m.points().iter().map(|&t| f(t)).collect();
        for s in [0.0, 1e-6, 0.01, 0.123, 0.31, 0.5] {
            assert!((ip.eval(&vals, s) - f(s)).abs() < 1e-13, "s={s}");
        }
    }

    #[test]
    fn linear_power_interp_matches_interp_eval_for_unit_power() {
        let m = make_mesh(0.0, 1.0, 7, 1.5).unwrap();
        let ip = PowerInterpolant::new(&m, 1.0, InterpOrder::Linear).unwrap();
        let vals: Vec<f64> = m.points().iter().map(|t| t.exp()).collect();
        for s in [0.0, 0.05, 0.4, 0.77, 1.0] {
            let a = ip.eval(&vals, s);
            let b = interp_eval(&m, &vals, s).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }
}
