//! CSV and summary files for a solve.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::picard::Solution;

/// Scientific notation with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn solution_csv(sol: &Solution) -> String {
    let mut s = String::from("t,y,x\n");
    for ((t, y), x) in sol.mesh.points().iter().zip(&sol.y).zip(&sol.x) {
        let _ = writeln!(s, "{},{},{}", num(*t), num(*y), num(*x));
    }
    s
}

pub fn iterations_csv(sol: &Solution) -> String {
    let mut s = String::from("n,d_n,u_n,ratio\n");
    for r in &sol.report.records {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.n,
            num(r.sup_diff),
            num(r.bound),
            num(r.ratio)
        );
    }
    s
}

pub fn summary(sol: &Solution, status: &str, wall: Duration) -> String {
    let p = &sol.problem;
    let h = &sol.hypotheses;
    let last = sol.report.records.last();
    let mut s = String::new();
    let _ = writeln!(s, "problem       {p}");
    let _ = writeln!(s, "status        {status}");
    let _ = writeln!(s, "gamma         {}", num(p.gamma_w()));
    let _ = writeln!(s, "mu            {}", num(p.mu()));
    let _ = writeln!(s, "mu+k          {}", num(p.gain()));
    let _ = writeln!(s, "M             {} ({})", num(h.m), h.m_source);
    if h.is_x_independent() {
        let _ = writeln!(s, "A             0 (right-hand side does not depend on x)");
    } else {
        let _ = writeln!(s, "A             {} ({})", num(h.a), h.a_source);
    }
    let _ = writeln!(s, "l computed    {}", num(sol.l_computed));
    let _ = writeln!(s, "l used        {}", num(sol.l_used));
    let _ = writeln!(
        s,
        "mesh          N = {}, r = {}, Q = {}, interp = {:?}",
        sol.config.n, sol.config.grading, sol.config.quad_nodes, sol.config.interp
    );
    let _ = writeln!(s, "iterations    {}", sol.report.iterations());
    if let Some(r) = last {
        let _ = writeln!(s, "last d_n      {}", num(r.sup_diff));
        let _ = writeln!(s, "tail bound    {}", num(r.tail));
    }
    let _ = writeln!(s, "residual_sup  {}", num(sol.residual_sup));
    let _ = writeln!(s, "tol           {}", num(sol.config.tol));
    let _ = writeln!(s, "wall time     {:.3} s", wall.as_secs_f64());
    if [h.m_source, h.a_source].contains(&crate::picard::Provenance::SampledEstimate) {
        let _ = writeln!(
            s,
            "note          sampled maxima are lower bounds of the true constants"
        );
    }
    s
}

/// Write `solution.csv`, `iterations.csv` and `summary.txt` into `dir`.
pub fn write_outputs(dir: &Path, sol: &Solution, status: &str, wall: Duration) -> Result<()> {
    write_atomic(&dir.join("solution.csv"), &solution_csv(sol))?;
    write_atomic(&dir.join("iterations.csv"), &iterations_csv(sol))?;
    write_atomic(&dir.join("summary.txt"), &summary(sol, status, wall))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
