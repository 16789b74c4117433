//! Command-line front end: `okidyn simulate|sweep|thresholds|classify`.

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use okidyn_core::dynamics::WageMode;

pub use commands::{run, BetaGrid, Command, RunManifest};
pub use error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum WageModeArg {
    Differential,
    ClosedForm,
}

#[derive(Debug, Parser)]
#[command(name = "okidyn", version, about = "Profit-rate dynamics under technology diffusion and endogenous wages")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Elasticity grid for sweep, start:stop:count
    #[arg(long)]
    beta_grid: Option<BetaGrid>,
    /// Override the configured wage elasticity
    #[arg(long)]
    beta: Option<f64>,
    /// Write SVG figures
    #[arg(long)]
    plot: bool,
    #[arg(long, value_enum)]
    wage_mode: Option<WageModeArg>,
}

/// Parses arguments, runs the command and returns the process exit code:
/// 0 success, 1 configuration error, 2 numerical failure.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 1;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let manifest = RunManifest {
        command: cli.command,
        config_path: cli.config,
        output_dir: cli.out,
        beta_grid: cli.beta_grid,
        beta: cli.beta,
        wage_mode: cli.wage_mode.map(|m| match m {
            WageModeArg::Differential => WageMode::Differential,
            WageModeArg::ClosedForm => WageMode::ClosedForm,
        }),
        plot: cli.plot,
    };
    match run(&manifest, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
