//! `dce` — batch front end for the cavity DCE simulator.
//!
//! Reads a TOML run configuration, evolves the system with the closed-form
//! propagator and/or the exact integrator, and writes a CSV table plus a JSON
//! metadata sidecar.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure,
//! 3 success with a truncation-leak warning.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dce_cli::config;
use dce_cli::run::{self, RunOutcome};

#[derive(Parser)]
#[command(
    name = "dce",
    version,
    about = "Modulated-cavity QED with a two-level atom: closed-form propagator vs exact integration"
)]
struct Cli {
    /// Path to a TOML run configuration.
    config: PathBuf,
    /// Override the configured mode (analytic|oracle|compare|sweep).
    #[arg(long)]
    mode: Option<String>,
    /// Override the configured output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Suppress progress output on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };

    let cfg = match config::parse_config_with_overrides(&text, cli.mode.as_deref(), cli.out_dir) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    match run::run(&cfg, cli.quiet) {
        Ok(artifacts) => match artifacts.outcome {
            RunOutcome::Clean => ExitCode::SUCCESS,
            RunOutcome::LeakWarning => ExitCode::from(3),
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
