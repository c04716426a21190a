//! Run configuration: command defaults, then a key=value file, then flags.

use clap::{Args, ValueEnum};
use serde::Serialize;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Inclusive range of k, written `20` or `5..64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KRange {
    pub start: u32,
    pub end: u32,
}

impl KRange {
    pub fn single(k: u32) -> Self {
        KRange { start: k, end: k }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.start..=self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad k `{t}`: {e}"));
        let r = match s.split_once("..") {
            Some((a, b)) => KRange {
                start: num(a)?,
                end: num(b.trim_start_matches('='))?,
            },
            None => KRange::single(num(s)?),
        };
        if r.start > r.end {
            return Err(format!("empty k range `{s}`"));
        }
        Ok(r)
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}..{}", self.start, self.end)
        }
    }
}

impl Serialize for KRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// Settings given on the command line or in a config file; unset fields
/// fall through to the next layer.
#[derive(Args, Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    /// Flat key=value file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// k or an inclusive range such as 5..64.
    #[arg(long)]
    pub k: Option<KRange>,
    /// θ in (1/a, 1/λc]; default is the midpoint.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub orbits: Option<usize>,
    /// Orbit length.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<usize>,
    /// Leaf length.
    #[arg(long = "L")]
    pub leaf_length: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Integrator step; default d/4.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub pullbacks: Option<usize>,
    /// Center-displaced pairs for the backward-convergence probe.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Hyperbolic-time rate b; default half the empirical a.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Margin tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Tolerance on the top exponent.
    #[arg(long = "lyap-tol")]
    pub lyap_tol: Option<f64>,
    /// Report path; stdout if unset.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra CSV path written next to a JSON report.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! layer {
    ($lo:expr, $hi:expr, $($f:ident),*) => {
        Overrides { $($f: $hi.$f.clone().or_else(|| $lo.$f.clone())),* }
    };
}

impl Overrides {
    /// Fields set in `hi` replace those in `self`.
    pub fn layered(&self, hi: &Overrides) -> Overrides {
        layer!(
            self, hi, config, k, theta, seed, samples, orbits, n, burn_in, leaf_length, grid, step,
            pullbacks, pairs, rate, tol, lyap_tol, out, csv, format
        )
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Overrides, String> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let err = |e: String| format!("line {}: {key}: {e}", i + 1);
            fn p<T: FromStr>(v: &str) -> Result<T, String>
            where
                T::Err: fmt::Display,
            {
                v.parse::<T>().map_err(|e| e.to_string())
            }
            match key {
                "k" => o.k = Some(p(value).map_err(err)?),
                "theta" => o.theta = Some(p(value).map_err(err)?),
                "seed" => o.seed = Some(p(value).map_err(err)?),
                "samples" => o.samples = Some(p(value).map_err(err)?),
                "orbits" => o.orbits = Some(p(value).map_err(err)?),
                "n" => o.n = Some(p(value).map_err(err)?),
                "burn-in" | "burn_in" => o.burn_in = Some(p(value).map_err(err)?),
                "L" | "leaf_length" => o.leaf_length = Some(p(value).map_err(err)?),
                "grid" => o.grid = Some(p(value).map_err(err)?),
                "step" => o.step = Some(p(value).map_err(err)?),
                "pullbacks" => o.pullbacks = Some(p(value).map_err(err)?),
                "pairs" => o.pairs = Some(p(value).map_err(err)?),
                "rate" => o.rate = Some(p(value).map_err(err)?),
                "tol" => o.tol = Some(p(value).map_err(err)?),
                "lyap-tol" | "lyap_tol" => o.lyap_tol = Some(p(value).map_err(err)?),
                "out" => o.out = Some(value.into()),
                "csv" => o.csv = Some(value.into()),
                "format" => o.format = Some(p(value).map_err(err)?),
                _ => return Err(format!("line {}: unknown key `{key}`", i + 1)),
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Overrides, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Overrides::parse_file(&text)
    }
}

/// Fully resolved settings, echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub k: KRange,
    pub theta: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub orbits: usize,
    pub n: usize,
    pub burn_in: usize,
    #[serde(rename = "L")]
    pub leaf_length: f64,
    pub grid: usize,
    pub step: Option<f64>,
    pub pullbacks: Option<usize>,
    pub pairs: usize,
    pub rate: Option<f64>,
    pub tol: f64,
    pub lyap_tol: f64,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Defaults shared by every command; commands adjust a few of them.
    pub fn base() -> Self {
        RunConfig {
            k: KRange::single(20),
            theta: None,
            seed: 1,
            samples: 100_000,
            orbits: 20,
            n: 1_000_000,
            burn_in: 1000,
            leaf_length: 1000.0,
            grid: 64,
            step: None,
            pullbacks: None,
            pairs: 1000,
            rate: None,
            tol: 1e-9,
            lyap_tol: 1e-5,
            out: None,
            csv: None,
            format: Format::Json,
        }
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = o.$f.clone() { self.$f = v; })* };
        }
        set!(k, seed, samples, orbits, n, burn_in, leaf_length, grid, pairs, tol, lyap_tol, format);
        macro_rules! set_opt {
            ($($f:ident),*) => { $(if o.$f.is_some() { self.$f = o.$f.clone(); })* };
        }
        set_opt!(theta, step, pullbacks, rate, out, csv);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_ranges() {
        assert_eq!("20".parse::<KRange>().unwrap(), KRange::single(20));
        let r: KRange = "5..64".parse().unwrap();
        assert_eq!((r.start, r.end, r.len()), (5, 64, 60));
        assert_eq!("5..=64".parse::<KRange>().unwrap(), r);
        assert!("9..5".parse::<KRange>().is_err());
        assert_eq!(r.to_string(), "5..64");
    }

    #[test]
    fn file_then_flags() {
        let file = Overrides::parse_file("# sweep\nk = 16..20\nseed=7\nsamples = 500 # small\nformat=csv\n").unwrap();
        let flags = Overrides {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = RunConfig::base().apply(&file.layered(&flags));
        assert_eq!(cfg.k, "16..20".parse().unwrap());
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.samples, 500);
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn bad_lines_rejected() {
        assert!(Overrides::parse_file("colour=blue").is_err());
        assert!(Overrides::parse_file("seed").is_err());
        assert!(Overrides::parse_file("seed=x").is_err());
    }
}
