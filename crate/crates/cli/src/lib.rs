//! Command-line front end: configuration layering, subcommands and reports.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{CliError, Command, Outcome};
pub use config::{Format, KRange, Overrides, RunConfig};
pub use report::{Report, Status, SCHEMA};

use clap::{Parser, Subcommand};
use std::io::Write;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "DA3_THREADS";

#[derive(Parser, Debug)]
#[command(name = "da3", version, about = "Numerical checks for DA diffeomorphisms of the 3-torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Eigenvalues, isolation brackets and eigenframe angles.
    Spectrum(Overrides),
    /// Tube lemma, cone invariance, volume domination, lattice certificate and B-set.
    Verify(Overrides),
    /// Lyapunov exponents and Birkhoff averages along random orbits.
    Lyapunov(Overrides),
    /// Hyperbolic times and their density along one orbit.
    Hyptimes(Overrides),
    /// Unstable-leaf density and backward convergence of center-displaced pairs.
    Leaf(Overrides),
    /// Separation and density of the center segment's lattice translates.
    Lattice(Overrides),
    /// Where unstable leaves through the unit box cross the YZ-plane.
    Usection(Overrides),
}

impl Cmd {
    pub fn parts(&self) -> (Command, &Overrides) {
        match self {
            Cmd::Spectrum(o) => (Command::Spectrum, o),
            Cmd::Verify(o) => (Command::Verify, o),
            Cmd::Lyapunov(o) => (Command::Lyapunov, o),
            Cmd::Hyptimes(o) => (Command::Hyptimes, o),
            Cmd::Leaf(o) => (Command::Leaf, o),
            Cmd::Lattice(o) => (Command::Lattice, o),
            Cmd::Usection(o) => (Command::Usection, o),
        }
    }
}

/// Command defaults, then the config file named by the flags, then the flags.
pub fn resolve(cmd: Command, flags: &Overrides) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => Overrides::load(path).map_err(CliError::Config)?,
        None => Overrides::default(),
    };
    Ok(cmd.defaults().apply(&file.layered(flags)))
}

/// Worker count from the environment, if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV}={v} is not a positive integer"))),
        },
    }
}

fn write_to(path: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Writes the report in the configured format, plus the CSV if `csv` is set.
pub fn write_outputs(out: &Outcome) -> Result<(), CliError> {
    let cfg = &out.report.config;
    let primary = match cfg.format {
        Format::Json => out.report.to_json(),
        Format::Csv => out.csv.clone(),
    };
    write_to(cfg.out.as_deref(), &primary)?;
    if let Some(p) = &cfg.csv {
        write_to(Some(p), &out.csv)?;
    }
    Ok(())
}
