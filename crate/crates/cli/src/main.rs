//! `cjl`: command-line front end to the Lawson-cone Jacobi laboratory.

mod commands;
mod config;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{Flags, RunConfig};
use output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "cjl", version, about = "Jacobi fields on minimal hypersurfaces asymptotic to Lawson cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Link spectrum, indicial roots and predicted decay rate of C(m,n).
    Spectrum,
    /// Integrate the invariant minimal profile from the R^m axis.
    Profile,
    /// Solve J ψ = tr(A³) along the profile and report decay diagnostics.
    Jacobi,
    /// Radial exterior Plateau graph in R^N.
    Plateau,
    /// Profile and Jacobi solve for a sweep of cones, in parallel.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Profile => "profile",
            Command::Jacobi => "jacobi",
            Command::Plateau => "plateau",
            Command::Report => "report",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<cjl_core::Error> for CliError {
    fn from(e: cjl_core::Error) -> Self {
        use cjl_core::Error as E;
        match e {
            E::InvalidCone { .. } | E::InvalidParameter(_) | E::RegimeMismatch { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = RunConfig::resolve(cli.command.name(), &cli.flags)?;
    let root = cfg.out.clone();
    let mut out = OutputDir::create(&root)?;
    let summary = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg, &mut out)?,
        Command::Profile => commands::profile(&cfg, &mut out)?,
        Command::Jacobi => commands::jacobi(&cfg, &mut out)?,
        Command::Plateau => commands::plateau(&cfg, &mut out)?,
        Command::Report => commands::report(&cfg, &root, &mut out)?,
    };
    out.finish(&cfg, started, summary)?;
    eprintln!("cjl {}: wrote {}", cfg.command, root.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cjl: {e}");
            ExitCode::from(e.code())
        }
    }
}
