use super::{finish, sweep, CliError, Command, Num, Outcome};
use crate::config::RunConfig;
use da3_core::damap::{params_with_theta, DAMap, TorusPoint};
use da3_core::foliation::{
    backward_convergence_probe, density_curve, trace_leaf, DensityReport, Direction, TraceOptions,
};
use da3_core::hyperbolicity::{cone_constants, orbit_start, PULLBACKS};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write;

pub const LEAF_HEADER: &str = "k,L,epsilon";

/// Center displacement of the second point of each pair.
pub const PESIN_OFFSET: f64 = 1e-3;
/// Backward steps allowed per pair.
pub const PESIN_STEPS: usize = 200;
/// Share of pairs that must converge.
pub const PESIN_SHARE: f64 = 0.95;

#[derive(Serialize)]
struct PesinSummary {
    pairs: usize,
    offset: f64,
    passed: usize,
    share: f64,
    diverged: usize,
    median_converged_at: Option<usize>,
    max_converged_at: Option<usize>,
}

#[derive(Serialize)]
struct LeafResult {
    start: [f64; 3],
    step: f64,
    pullbacks: usize,
    points: usize,
    length: f64,
    curve: Vec<DensityReport>,
    /// ε at the longest length is below ε at the shortest.
    improves: bool,
    pesin: PesinSummary,
}

/// 10, 100, … below `l`, then `l`.
fn lengths(l: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = 10.0;
    while x < l {
        out.push(x);
        x *= 10.0;
    }
    out.push(l);
    out
}

fn pesin(map: &DAMap<f64>, pairs: usize, seed: u64) -> da3_core::Result<PesinSummary> {
    let e_c = map.params.frame.e_c;
    let reports = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let x = orbit_start::<f64>(seed.wrapping_add(1), i);
            let y = TorusPoint::project(x.coords() + e_c * PESIN_OFFSET);
            backward_convergence_probe(map, &x, &y, PESIN_STEPS)
        })
        .collect::<da3_core::Result<Vec<_>>>()?;
    let passed = reports.iter().filter(|r| r.pass).count();
    let mut steps: Vec<usize> = reports.iter().filter_map(|r| r.converged_at).collect();
    steps.sort_unstable();
    Ok(PesinSummary {
        pairs,
        offset: PESIN_OFFSET,
        passed,
        share: if pairs > 0 { passed as f64 / pairs as f64 } else { 0.0 },
        diverged: reports.iter().filter(|r| r.diverged).count(),
        median_converged_at: steps.get(steps.len() / 2).copied(),
        max_converged_at: steps.last().copied(),
    })
}

fn at(k: u32, cfg: &RunConfig) -> da3_core::Result<(bool, LeafResult)> {
    let params = params_with_theta::<f64>(k, cfg.theta)?;
    let cc = cone_constants(&params)?;
    let map = DAMap::new(params)?;
    let step = cfg.step.unwrap_or(map.params.tube.d / 4.0);
    let pullbacks = cfg.pullbacks.unwrap_or(PULLBACKS);
    let x0 = orbit_start::<f64>(cfg.seed, 0);
    let opts = TraceOptions { pullbacks, cone: cc.ku };
    let leaf = trace_leaf(&map, &x0, Direction::Unstable, cfg.leaf_length, step, &opts)?;
    let curve = density_curve(&leaf, &lengths(cfg.leaf_length), cfg.grid)?;
    let improves = curve.len() >= 2 && curve[curve.len() - 1].epsilon < curve[0].epsilon;
    let pesin = pesin(&map, cfg.pairs, cfg.seed)?;
    let pass = improves && pesin.share >= PESIN_SHARE;
    Ok((
        pass,
        LeafResult {
            start: x0.coords().to_f64(),
            step,
            pullbacks,
            points: leaf.points.len(),
            length: leaf.length(),
            curve,
            improves,
            pesin,
        },
    ))
}

pub(super) fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = sweep(cfg.k, |k| at(k, cfg))?;
    Ok(finish(cmd, cfg, rows, LEAF_HEADER, |k, r, out| {
        for d in &r.curve {
            writeln!(out, "{k},{},{}", Num(d.leaf_length), Num(d.epsilon)).expect("string write");
        }
    }))
}
