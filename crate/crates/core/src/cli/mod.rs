//! Command implementations behind the `hilfer` binary.
//!
//! Every command writes its human-readable report to the supplied writer and
//! returns an [`Error`] whose [`Error::exit_code`] is the process status.

mod config;
mod example;
mod output;
mod sweep;
mod verify;

use std::io::Write;
use std::path::Path;
use std::time::Instant;

pub use config::{load_config, LoadedConfig, RunConfig, Scalar};
pub use example::{
    cmd_example, example_problem, run_example, ExampleReport, EXAMPLE_RHS, PUBLISHED_L, PUBLISHED_M,
};
pub use output::{iterations_csv, num, solution_csv, summary, write_atomic, write_outputs};
pub use sweep::{cmd_sweep, run_sweep, sweep_csv, SweepAxis, SweepRow};
pub use verify::{cmd_verify, run_checks, Check, Selector};

use crate::error::{Error, Result};
use crate::picard::solve;

/// Environment variable capping intra-step parallelism; 0 runs sequentially.
pub const THREADS_ENV: &str = "HP_THREADS";

pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidNumerics(format!("{THREADS_ENV}={v:?} is not a count"))),
        Err(_) => Ok(0),
    }
}

pub(crate) fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

/// Solve the configured problem and write the output files.
///
/// A non-converged run still writes its partial iterate before failing.
pub fn cmd_solve(config: &Path, out_dir: Option<&Path>, w: &mut dyn Write) -> Result<()> {
    let mut cfg = load_config(config)?;
    cfg.solve.threads = threads_from_env()?;
    let dir = out_dir.map_or(cfg.output_dir.clone(), Path::to_path_buf);
    let started = Instant::now();
    match solve(&cfg.problem, cfg.known, &cfg.solve) {
        Ok(sol) => {
            write_outputs(&dir, &sol, "converged", started.elapsed())?;
            writeln!(
                w,
                "converged in {} iterations on (a, a+{}], residual_sup = {}",
                sol.report.iterations(),
                sol.l_used,
                num(sol.residual_sup)
            )
            .map_err(io_err)?;
            writeln!(w, "wrote {}", dir.display()).map_err(io_err)?;
            Ok(())
        }
        Err(Error::NotConverged {
            iterations,
            last_diff,
            tail,
            partial,
        }) => {
            write_outputs(&dir, &partial, "not converged", started.elapsed())?;
            Err(Error::NotConverged {
                iterations,
                last_diff,
                tail,
                partial,
            })
        }
        Err(e) => Err(e),
    }
}
