//! Convergence studies over one numerical or model parameter.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::picard::{solve, Problem, Solution};
use crate::quadrature::PowerInterpolant;

use super::{io_err, load_config, num, threads_from_env, write_atomic, LoadedConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    N,
    Q,
    Alpha,
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "N" | "n" => Ok(Self::N),
            "Q" | "q" => Ok(Self::Q),
            "alpha" => Ok(Self::Alpha),
            _ => Err(format!("unknown axis {s:?}; use N, Q or alpha")),
        }
    }
}

impl SweepAxis {
    fn name(self) -> &'static str {
        match self {
            SweepAxis::N => "N",
            SweepAxis::Q => "Q",
            SweepAxis::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub status: String,
    pub iterations: usize,
    pub residual_sup: f64,
    /// `max |y - y_finest|` over this row's mesh points; NaN on the alpha axis.
    pub change_vs_finest: f64,
    /// `log(change_i / change_{i+1}) / log(value_{i+1} / value_i)`.
    pub observed_order: f64,
    pub wall_time: f64,
    solution: Option<Solution>,
}

fn configure(base: &LoadedConfig, axis: SweepAxis, value: f64) -> Result<LoadedConfig> {
    let mut cfg = base.clone();
    let count = || {
        if value >= 1.0 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(Error::InvalidNumerics(format!(
                "{} = {value} is not a positive integer",
                axis.name()
            )))
        }
    };
    match axis {
        SweepAxis::N => cfg.solve.n = count()?,
        SweepAxis::Q => cfg.solve.quad_nodes = count()?,
        SweepAxis::Alpha => {
            let mut params = *cfg.problem.params();
            params.alpha = value;
            cfg.problem = Problem::new(params, cfg.problem.rhs().clone())?;
        }
    }
    cfg.solve.validate()?;
    Ok(cfg)
}

fn status_of(e: &Error) -> &'static str {
    match e {
        Error::NotConverged { .. } => "not_converged",
        Error::Confinement { .. } => "confinement",
        Error::RhsDomain { .. } => "rhs_domain",
        _ => "error",
    }
}

fn run_row(base: &LoadedConfig, axis: SweepAxis, value: f64) -> SweepRow {
    let started = Instant::now();
    let result = configure(base, axis, value).and_then(|c| solve(&c.problem, c.known, &c.solve));
    let mut row = SweepRow {
        value,
        status: String::new(),
        iterations: 0,
        residual_sup: f64::NAN,
        change_vs_finest: f64::NAN,
        observed_order: f64::NAN,
        wall_time: 0.0,
        solution: None,
    };
    match result {
        Ok(sol) => {
            row.status = "converged".into();
            row.iterations = sol.report.iterations();
            row.residual_sup = sol.residual_sup;
            row.solution = Some(sol);
        }
        Err(e) => {
            row.status = status_of(&e).into();
            if let Error::NotConverged { partial, .. } = e {
                row.iterations = partial.report.iterations();
                row.residual_sup = partial.residual_sup;
            }
        }
    }
    row.wall_time = started.elapsed().as_secs_f64();
    row
}

/// `max_j |y_j - finest(t_j)|`, evaluating the finest solution by its own
/// interpolant when meshes differ.
fn change(sol: &Solution, finest: &Solution) -> Result<f64> {
    let interp = PowerInterpolant::new(
        &finest.mesh,
        finest.problem.interp_power(),
        finest.config.interp,
    )?;
    Ok(sol
        .mesh
        .points()
        .iter()
        .zip(&sol.y)
        .map(|(&t, y)| (y - interp.eval(&finest.y, t.min(finest.mesh.end()))).abs())
        .fold(0.0, f64::max))
}

pub fn run_sweep(base: &LoadedConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidNumerics("no sweep values".into()));
    }
    let mut rows: Vec<SweepRow> = values.par_iter().map(|&v| run_row(base, axis, v)).collect();
    if axis == SweepAxis::Alpha {
        return Ok(rows);
    }
    let finest = rows
        .iter()
        .filter(|r| r.solution.is_some())
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .map(|r| (r.value, r.solution.clone().expect("filtered")));
    if let Some((fv, finest)) = finest {
        for r in rows.iter_mut() {
            if let Some(sol) = &r.solution {
                if r.value != fv {
                    r.change_vs_finest = change(sol, &finest)?;
                }
            }
        }
    }
    let mut order = vec![f64::NAN; rows.len()];
    for i in 0..rows.len().saturating_sub(1) {
        let (a, b) = (&rows[i], &rows[i + 1]);
        let (ca, cb) = (a.change_vs_finest, b.change_vs_finest);
        if ca > 0.0 && cb > 0.0 && b.value != a.value {
            order[i] = (ca / cb).ln() / (b.value / a.value).ln();
        }
    }
    for (r, o) in rows.iter_mut().zip(order) {
        r.observed_order = o;
    }
    Ok(rows)
}

fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        num(v)
    }
}

pub fn sweep_csv(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let mut s = format!(
        "{},status,iterations,residual_sup,sup_change_vs_finest,observed_order,wall_time_s\n",
        axis.name()
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.3}",
            num(r.value),
            r.status,
            r.iterations,
            cell(r.residual_sup),
            cell(r.change_vs_finest),
            cell(r.observed_order),
            r.wall_time
        );
    }
    s
}

/// Run one solve per value and write `sweep.csv`. Failed rows are marked and
/// the sweep continues; the command fails if any row did not converge.
pub fn cmd_sweep(
    config: &Path,
    axis: SweepAxis,
    values: &[f64],
    out_dir: Option<&Path>,
    w: &mut dyn Write,
) -> Result<()> {
    let mut base = load_config(config)?;
    base.solve.threads = threads_from_env()?;
    let dir = out_dir.map_or(base.output_dir.clone(), Path::to_path_buf);
    let rows = run_sweep(&base, axis, values)?;
    let csv = sweep_csv(axis, &rows);
    write_atomic(&dir.join("sweep.csv"), &csv)?;
    w.write_all(csv.as_bytes()).map_err(io_err)?;
    let failed = rows.iter().filter(|r| r.status != "converged").count();
    if failed > 0 {
        return Err(Error::InvalidNumerics(format!(
            "{failed} of {} sweep rows failed",
            rows.len()
        )));
    }
    Ok(())
}
