use super::{finish, sweep, CliError, Command, Num, Outcome};
use crate::config::RunConfig;
use da3_core::damap::{b_set_check, params_with_theta, BSetReport, DAMap, MapManifest};
use da3_core::hyperbolicity::{
    check_cone_invariance, check_volume_domination, cone_constants, generic_dominated_splitting_check,
    ConeParams, ConeReport, DominatedSplitting, SplittingReport, VolumeReport,
};
use da3_core::perturbation::{verify_tube_lemma, TubeLemmaReport};
use serde::Serialize;
use std::fmt::Write;

pub const VERIFY_HEADER: &str = "k,status,tube_margin,unstable_cone_margin,stable_cone_margin,\
expanding_log_margin,contracting_log_margin,lattice_gap_margin,b_set_pass";

/// Cap on B-set samples per kind.
pub const B_SET_SAMPLES: usize = 10_000;

#[derive(Serialize)]
struct Margins {
    tube: f64,
    unstable_cone: f64,
    stable_cone: f64,
    expanding_log: f64,
    contracting_log: f64,
    /// Gap between tube translates minus the larger of 2d and the
    /// cross-section diameter.
    lattice_gap: f64,
    /// Expanding log-margin at least 2 log λu − tol.
    expanding_at_bound: bool,
}

#[derive(Serialize)]
struct VerifyResult {
    map: MapManifest,
    cone_constants: ConeParams<f64>,
    margins: Margins,
    tube_lemma: TubeLemmaReport,
    cones: ConeReport,
    volume: VolumeReport,
    splitting: SplittingReport,
    b_set: BSetReport,
}

fn at(k: u32, cfg: &RunConfig) -> da3_core::Result<(bool, VerifyResult)> {
    let params = params_with_theta::<f64>(k, cfg.theta)?;
    let cc = cone_constants(&params)?;
    let map = DAMap::new(params)?;
    let tube = verify_tube_lemma(&map.cylinder, cfg.samples, cfg.seed);
    let cones = check_cone_invariance(&map, &cc, cfg.samples, cfg.seed)?;
    let volume = check_volume_domination(&map, cfg.samples, cfg.seed)?;
    let splitting = generic_dominated_splitting_check(&map, &DominatedSplitting::from_cones(&cc), cfg.samples, cfg.seed)?;
    let b_set = b_set_check(&map, cfg.samples.min(B_SET_SAMPLES), cfg.seed)?;
    let cert = &map.params.certificate;
    let margins = Margins {
        tube: tube.margins.iter().copied().fold(f64::INFINITY, f64::min) + 0.0,
        unstable_cone: cones.min_unstable_margin,
        stable_cone: cones.min_stable_margin,
        expanding_log: volume.min_expanding_log_margin,
        contracting_log: volume.min_contracting_log_margin,
        lattice_gap: cert.gap.distance - cert.two_d.max(cert.cross_section_diameter),
        expanding_at_bound: volume.min_expanding_log_margin >= volume.expected_log_margins[0] - cfg.tol,
    };
    let pass = tube.pass
        && cones.pass
        && volume.pass
        && margins.expanding_at_bound
        && splitting.pass
        && cert.pass
        && b_set.pass;
    Ok((
        pass,
        VerifyResult {
            map: MapManifest::from_map(&map),
            cone_constants: cc,
            margins,
            tube_lemma: tube,
            cones,
            volume,
            splitting,
            b_set,
        },
    ))
}

pub(super) fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = sweep(cfg.k, |k| at(k, cfg))?;
    Ok(finish(cmd, cfg, rows, VERIFY_HEADER, |k, r, out| {
        let m = &r.margins;
        let pass = r.tube_lemma.pass && r.cones.pass && r.volume.pass && r.splitting.pass && r.b_set.pass;
        writeln!(
            out,
            "{k},{},{},{},{},{},{},{},{}",
            if pass && m.expanding_at_bound { "pass" } else { "fail" },
            Num(m.tube),
            Num(m.unstable_cone),
            Num(m.stable_cone),
            Num(m.expanding_log),
            Num(m.contracting_log),
            Num(m.lattice_gap),
            r.b_set.pass
        )
        .expect("string write");
    }))
}
