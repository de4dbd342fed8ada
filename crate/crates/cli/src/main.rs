//! `trifringe`: simulate, sweep, fit and validate three-photon interference fringes.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod csvio;
mod error;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "trifringe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: RunConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Three-photon fringe over one period, as rates or seeded Poisson counts
    Simulate,
    /// Normalized fringes and harmonic summary over an amplitude-ratio range
    Sweep,
    /// Fit a scan file to the harmonic fringe model
    Fit,
    /// Minimum phase uncertainty per amplitude ratio with SQL and Heisenberg references
    Sensitivity,
    /// Check the closed-form model against the exact simulation
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::resolve(&cli.options).and_then(|cfg| match cli.command {
        Command::Simulate => commands::simulate(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::Fit => commands::fit(&cfg),
        Command::Sensitivity => commands::sensitivity(&cfg),
        Command::Validate => commands::validate_cmd(&cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trifringe: {e}");
            e.exit_code()
        }
    }
}
