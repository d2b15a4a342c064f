//! `risask`: experiment driver for the RIS-assisted noncoherent ASK chain.
//!
//! Subcommands generate machine-readable plot data (CSV/JSON):
//! `sweep` (SEP vs average SNR), `optimize` (energy-constrained optimal
//! constellation), `compare` (traditional vs optimal constellation points),
//! and `validate` (closed forms vs Monte Carlo oracles).

mod commands;
mod common;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "risask", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SEP versus average SNR per symbol; one CSV row per grid point.
    Sweep(commands::sweep::Args),
    /// Design the energy-constrained optimal constellation at one SNR.
    Optimize(commands::optimize::Args),
    /// Tabulate traditional vs optimal constellation points.
    Compare(commands::compare::Args),
    /// Run the closed-form-vs-Monte-Carlo validation grid.
    Validate(commands::validate::Args),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(args) => commands::sweep::run(&args),
        Command::Optimize(args) => commands::optimize::run(&args),
        Command::Compare(args) => commands::compare::run(&args),
        Command::Validate(args) => commands::validate::run(&args),
    };
    match outcome {
        Ok(()) => {}
        Err(err) => {
            eprintln!("risask: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
