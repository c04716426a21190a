use super::{finish, sweep, CliError, Command, Num, Outcome};
use crate::config::RunConfig;
use da3_core::foliation::lattice::{lattice_geometry, LatticeGeometry};
use std::fmt::Write;

pub const LATTICE_HEADER: &str = "k,min_gap,two_d,epsilon,bound,m_gap,max_spacing_error";

/// Allowed deviation of consecutive w distances from the closed form.
const SPACING_TOL: f64 = 1e-12;

fn at(k: u32) -> da3_core::Result<(bool, LatticeGeometry)> {
    let g = lattice_geometry::<f64>(k)?;
    let pass = g.gap_pass && g.density_pass && g.m_gap_pass && g.sequences.max_spacing_error <= SPACING_TOL;
    Ok((pass, g))
}

pub(super) fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = sweep(cfg.k, at)?;
    Ok(finish(cmd, cfg, rows, LATTICE_HEADER, |k, g, out| {
        writeln!(
            out,
            "{k},{},{},{},{},{},{}",
            Num(g.min_gap.distance),
            Num(2.0 * g.d),
            Num(g.density.epsilon),
            Num(g.density.bound),
            Num(g.sequences.m_gap),
            Num(g.sequences.max_spacing_error)
        )
        .expect("string write");
    }))
}
