use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hilfer_core::cli::{cmd_example, cmd_solve, cmd_sweep, cmd_verify, Selector, SweepAxis};

/// Picard iteration for singular Hilfer fractional initial value problems.
#[derive(Parser)]
#[command(name = "hilfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem in a TOML config and write CSV output.
    Solve {
        config: PathBuf,
        /// Output directory (default: [output] dir of the config).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the built-in singular example.
    Example,
    /// Run the self-checks: all, gamma, operators, quadrature or oracle.
    Verify {
        #[arg(default_value = "all")]
        selector: Selector,
    },
    /// Re-solve a config for each value of one parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut w = stdout.lock();
    let result = match &cli.command {
        Command::Solve { config, out } => cmd_solve(config, out.as_deref(), &mut w),
        Command::Example => cmd_example(&mut w),
        Command::Verify { selector } => cmd_verify(*selector, &mut w),
        Command::Sweep {
            config,
            axis,
            values,
            out,
        } => cmd_sweep(config, *axis, values, out.as_deref(), &mut w),
    };
    let _ = w.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
