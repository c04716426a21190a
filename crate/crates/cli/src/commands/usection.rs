use super::{finish, sweep, CliError, Command, Num, Outcome};
use crate::config::RunConfig;
use da3_core::damap::{params_with_theta, DAMap};
use da3_core::foliation::{u_section_probe, USectionOptions, USectionReport};
use da3_core::hyperbolicity::{cone_constants, default_pullbacks};
use std::fmt::Write;

pub const USECTION_HEADER: &str = "k,samples,ku,ks,b,stable_window,cone_inclusion,max_abs_crossing,\
inside_cone_window,inside_stable_window,integrator_error";

/// Target accuracy of the pulled-back slopes.
pub const SLOPE_TOL: f64 = 1e-17;

/// Samples re-integrated at half step.
const CHECKED_SAMPLES: usize = 10;

fn at(k: u32, cfg: &RunConfig) -> da3_core::Result<(bool, USectionReport)> {
    let params = params_with_theta::<f64>(k, cfg.theta)?;
    let cc = cone_constants(&params)?;
    let map = DAMap::new(params)?;
    let opts = USectionOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        pullbacks: cfg.pullbacks.unwrap_or_else(|| default_pullbacks(cc.theta, SLOPE_TOL)),
        check_every: (cfg.samples / CHECKED_SAMPLES).max(1),
    };
    let step = cfg.step.unwrap_or(map.params.tube.d / 4.0);
    let r = u_section_probe(&map, k, &cc, map.params.tube.b, step, &opts)?;
    Ok((r.pass, r))
}

pub(super) fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = sweep(cfg.k, |k| at(k, cfg))?;
    Ok(finish(cmd, cfg, rows, USECTION_HEADER, |k, r, out| {
        writeln!(
            out,
            "{k},{},{},{},{},{},{},{},{},{},{}",
            r.samples,
            Num(r.ku),
            Num(r.ks),
            Num(r.b),
            Num(r.stable_window),
            r.cone_inclusion,
            Num(r.max_abs_crossing),
            r.inside_cone_window,
            r.inside_stable_window,
            Num(r.integrator_error)
        )
        .expect("string write");
    }))
}
