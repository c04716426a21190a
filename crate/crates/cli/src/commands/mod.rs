//! One module per subcommand. Each runs a sweep over k and renders the
//! report and a CSV with a fixed header.

mod lattice;
mod leaf;
mod orbits;
mod spectrum;
mod usection;
mod verify;

use crate::config::{KRange, RunConfig};
use crate::report::{Entry, Report, Status};
use da3_core::anosov::MIN_K;
use da3_core::hyperbolicity::u_section_threshold;
use da3_core::Error;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

pub use lattice::LATTICE_HEADER;
pub use leaf::{LEAF_HEADER, PESIN_OFFSET, PESIN_STEPS, PESIN_SHARE};
pub use orbits::{HYPTIMES_HEADER, LYAPUNOV_HEADER};
pub use spectrum::SPECTRUM_HEADER;
pub use usection::{USECTION_HEADER, SLOPE_TOL};
pub use verify::{VERIFY_HEADER, B_SET_SAMPLES};

/// Largest k searched for the u-section threshold.
pub const USECTION_SEARCH_MAX: u32 = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Verify,
    Lyapunov,
    Hyptimes,
    Leaf,
    Lattice,
    Usection,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Verify => "verify",
            Command::Lyapunov => "lyapunov",
            Command::Hyptimes => "hyptimes",
            Command::Leaf => "leaf",
            Command::Lattice => "lattice",
            Command::Usection => "usection",
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum-brackets",
            Command::Verify => "partial-hyperbolicity",
            Command::Lyapunov => "uniform-cu-and-center-exponents",
            Command::Hyptimes => "hyperbolic-times",
            Command::Leaf => "unstable-leaf-density",
            Command::Lattice => "center-segment-separation",
            Command::Usection => "u-section-crossing",
        }
    }

    /// Command defaults before any file or flag is applied.
    pub fn defaults(self) -> RunConfig {
        let base = RunConfig::base();
        match self {
            Command::Spectrum => RunConfig {
                k: KRange { start: MIN_K, end: 64 },
                ..base
            },
            Command::Hyptimes => RunConfig { n: 100_000, ..base },
            Command::Usection => RunConfig {
                k: KRange::single(
                    u_section_threshold(MIN_K, USECTION_SEARCH_MAX).map_or(base.k.start, |t| t + 5),
                ),
                samples: 1000,
                ..base
            },
            _ => base,
        }
    }

    pub fn run(self, cfg: &RunConfig) -> Result<Outcome, CliError> {
        match self {
            Command::Spectrum => spectrum::run(self, cfg),
            Command::Verify => verify::run(self, cfg),
            Command::Lyapunov => orbits::run_lyapunov(self, cfg),
            Command::Hyptimes => orbits::run_hyptimes(self, cfg),
            Command::Leaf => leaf::run(self, cfg),
            Command::Lattice => lattice::run(self, cfg),
            Command::Usection => usection::run(self, cfg),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core { k: Option<u32>, source: Error },
    Io(String),
}

impl CliError {
    /// 2 for bad parameters, 3 for internal or precision failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core { source, .. } if source.is_infeasible() => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Core { k: Some(k), source } => write!(f, "k={k}: {source}"),
            CliError::Core { k: None, source } => write!(f, "{source}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub struct Outcome {
    pub report: Report,
    pub csv: String,
}

/// CSV number: plain decimals in [1e-4, 1e15), exponent form otherwise;
/// both round-trip.
pub(crate) struct Num(pub f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

/// Result of one k.
pub(crate) struct Row<T> {
    pub k: u32,
    pub status: Status,
    pub reason: Option<String>,
    pub result: Option<T>,
}

/// Runs `f` for every k in parallel and gathers rows in k order. Parameter
/// errors become infeasible rows; anything else aborts the run.
pub(crate) fn sweep<T, F>(ks: KRange, f: F) -> Result<Vec<Row<T>>, CliError>
where
    T: Send,
    F: Fn(u32) -> da3_core::Result<(bool, T)> + Sync,
{
    let ks: Vec<u32> = ks.iter().collect();
    let results: Vec<_> = ks.par_iter().map(|&k| (k, f(k))).collect();
    results
        .into_iter()
        .map(|(k, r)| match r {
            Ok((pass, t)) => Ok(Row {
                k,
                status: Status::from_pass(pass),
                reason: None,
                result: Some(t),
            }),
            Err(e) if e.is_infeasible() => Ok(Row {
                k,
                status: Status::Infeasible,
                reason: Some(e.to_string()),
                result: None,
            }),
            Err(e) => Err(CliError::Core { k: Some(k), source: e }),
        })
        .collect()
}

/// Builds the report and the CSV (header plus one or more lines per feasible
/// row).
pub(crate) fn finish<T: Serialize>(
    cmd: Command,
    cfg: &RunConfig,
    rows: Vec<Row<T>>,
    header: &str,
    csv_rows: impl Fn(u32, &T, &mut String),
) -> Outcome {
    let mut csv = format!("{header}\n");
    let entries = rows
        .into_iter()
        .map(|row| {
            if let Some(t) = &row.result {
                csv_rows(row.k, t, &mut csv);
            }
            Entry {
                k: row.k,
                status: row.status,
                reason: row.reason,
                result: row
                    .result
                    .map_or(serde_json::Value::Null, |t| serde_json::to_value(t).expect("result serializes")),
            }
        })
        .collect();
    Outcome {
        report: Report::new(cmd.name(), cmd.anchor(), cfg.clone(), entries),
        csv,
    }
}

#[cfg(test)]
mod tests {
    use super::Num;

    #[test]
    fn csv_numbers() {
        assert_eq!(Num(0.25).to_string(), "0.25");
        assert_eq!(Num(1.2e-32).to_string(), "1.2e-32");
        assert_eq!(Num(0.0).to_string(), "0");
        assert_eq!(Num(3e20).to_string(), "3e20");
        let x = 0.1 + 0.2;
        assert_eq!(Num(x).to_string().parse::<f64>().unwrap(), x);
    }
}
