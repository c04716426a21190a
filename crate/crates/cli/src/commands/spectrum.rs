use super::{finish, sweep, CliError, Command, Num, Outcome};
use crate::config::RunConfig;
use da3_core::anosov::{frame_for_k, sign_table, spectrum};
use da3_core::{Real, Wide};
use serde::Serialize;
use std::fmt::Write;

pub const SPECTRUM_HEADER: &str = "k,lambda_s,lambda_c,lambda_u,product_err";

/// Roots below this product error count as a valid spectrum.
const PRODUCT_TOL: f64 = 1e-10;

#[derive(Serialize)]
struct SignRow {
    point: f64,
    value: f64,
    positive_expected: bool,
    holds: bool,
}

#[derive(Serialize)]
struct SpectrumResult {
    lambda_s: f64,
    lambda_c: f64,
    lambda_u: f64,
    product_err: f64,
    brackets: [[f64; 2]; 3],
    inside_brackets: bool,
    residuals: [f64; 3],
    sign_table: Vec<SignRow>,
    /// Angles of e^u, e^c, e^s to their large-k limits.
    limit_angles: [f64; 3],
}

fn at(k: u32) -> da3_core::Result<(bool, SpectrumResult)> {
    let s = spectrum::<Wide>(k)?;
    let (_, frame) = frame_for_k::<f64>(k)?;
    let table: Vec<SignRow> = sign_table::<Wide>(k)
        .iter()
        .map(|e| SignRow {
            point: e.point.f64(),
            value: e.value.f64(),
            positive_expected: e.positive_expected,
            holds: e.holds,
        })
        .collect();
    let r = SpectrumResult {
        lambda_s: s.lambda_s.f64(),
        lambda_c: s.lambda_c.f64(),
        lambda_u: s.lambda_u.f64(),
        product_err: s.product_error().f64(),
        brackets: s.brackets.map(|b| [b.lo.f64(), b.hi.f64()]),
        inside_brackets: s.roots_inside_brackets(),
        residuals: s.residuals.map(|x| x.f64()),
        limit_angles: frame.limit_angles(),
        sign_table: table,
    };
    let pass = r.inside_brackets && r.product_err <= PRODUCT_TOL && r.sign_table.iter().all(|e| e.holds);
    Ok((pass, r))
}

pub(super) fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = sweep(cfg.k, at)?;
    Ok(finish(cmd, cfg, rows, SPECTRUM_HEADER, |k, r, out| {
        writeln!(out, "{k},{},{},{},{}", Num(r.lambda_s), Num(r.lambda_c), Num(r.lambda_u), Num(r.product_err)).expect("string write");
    }))
}
