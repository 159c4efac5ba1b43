//! `nifs`: command-line front end for the nifs-core library.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 mathematical markers in the output
//! (infinite Bowen dimension, inconclusive or failed verdicts), 3 internal failure.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Flags;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Marker,
}

#[derive(Parser)]
#[command(name = "nifs", version, about = "Parameterized non-autonomous conformal IFS laboratory")]
struct Cli {
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bowen dimension s(t) by bisection on the pressure.
    Pressure(Flags),
    /// Dimension sweep: Bowen dimension against box-counting estimates.
    Dim(Flags),
    /// Transversality constants C_n and the double-zero search.
    Transversality(Flags),
    /// Condition report for a family over a parameter grid.
    Conditions(Flags),
    /// Finite-level Gibbs masses and their certificate.
    Gibbs(Flags),
    /// PNG raster of a sampled limit set.
    Render(Flags),
    /// Bowen dimension along a parameter path.
    Sweep(Flags),
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let (flags, f): (&Flags, fn(&config::RunConfig) -> Result<Outcome, CliError>) =
        match &cli.command {
            Command::Pressure(x) => (x, commands::pressure),
            Command::Dim(x) => (x, commands::dim),
            Command::Transversality(x) => (x, commands::transversality),
            Command::Conditions(x) => (x, commands::conditions),
            Command::Gibbs(x) => (x, commands::gibbs),
            Command::Render(x) => (x, commands::render),
            Command::Sweep(x) => (x, commands::sweep),
        };
    f(&flags.resolve()?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Marker) => ExitCode::from(2),
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
