use super::{finish, sweep, CliError, Command, Num, Outcome};
use crate::config::RunConfig;
use da3_core::damap::{params_with_theta, DAMap, LinearAnosov, TorusMap};
use da3_core::hyperbolicity::{
    birkhoff_check, hyperbolic_times, lyapunov_exponents, orbit_start, orbit_stats, BirkhoffReport, Exponents,
};
use serde::Serialize;
use std::fmt::Write;

pub const LYAPUNOV_HEADER: &str = "k,orbit,lam_u,lam_c,lam_s,cu_margin,center_margin";
pub const HYPTIMES_HEADER: &str = "k,time";

/// Hyperbolic times listed in the JSON report; the CSV has all of them.
const LISTED_TIMES: usize = 32;

fn da_map(k: u32, cfg: &RunConfig) -> da3_core::Result<DAMap<f64>> {
    DAMap::new(params_with_theta::<f64>(k, cfg.theta)?)
}

#[derive(Serialize)]
struct LyapunovResult {
    linear: Exponents,
    /// |λ_u(A_k) − log λu|.
    linear_top_error: f64,
    /// 2 log λu, the rate of the constant (1,1) cocycle entry.
    target_lam_u: f64,
    max_top_error: f64,
    min_lam_c: f64,
    birkhoff: BirkhoffReport,
}

fn lyapunov_at(k: u32, cfg: &RunConfig) -> da3_core::Result<(bool, LyapunovResult)> {
    let map = da_map(k, cfg)?;
    let lin = LinearAnosov::<f64>::new(k)?;
    let linear = lyapunov_exponents(&lin, &orbit_start(cfg.seed, 0), cfg.n)?;
    let birkhoff = birkhoff_check(&map, cfg.orbits, cfg.n, cfg.burn_in, cfg.seed)?;
    let target = map.unstable_factor().ln();
    let max_top_error = birkhoff
        .per_orbit
        .iter()
        .map(|o| (o.exponents.lam_u - target).abs())
        .fold(0.0, f64::max);
    let min_lam_c = birkhoff
        .per_orbit
        .iter()
        .map(|o| o.exponents.lam_c)
        .fold(f64::INFINITY, f64::min);
    let r = LyapunovResult {
        linear_top_error: (linear.lam_u - lin.spectrum.lambda_u.ln()).abs(),
        linear,
        target_lam_u: target,
        max_top_error,
        min_lam_c,
        birkhoff,
    };
    let pass = r.birkhoff.pass && r.max_top_error <= cfg.lyap_tol && r.min_lam_c > 0.0 && r.linear_top_error <= cfg.lyap_tol;
    Ok((pass, r))
}

pub(super) fn run_lyapunov(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = sweep(cfg.k, |k| lyapunov_at(k, cfg))?;
    Ok(finish(cmd, cfg, rows, LYAPUNOV_HEADER, |k, r, out| {
        for (i, o) in r.birkhoff.per_orbit.iter().enumerate() {
            let e = &o.exponents;
            writeln!(out, "{k},{i},{},{},{},{},{}", Num(e.lam_u), Num(e.lam_c), Num(e.lam_s), Num(o.cu_margin), Num(o.center_margin))
                .expect("string write");
        }
    }))
}

#[derive(Serialize)]
struct HypTimesResult {
    n: usize,
    burn_in: usize,
    /// Half the smaller of the cu-determinant and center margins.
    a_emp: f64,
    rate: f64,
    mean_lognorm: f64,
    /// max of −log‖Tf⁻¹|E^cu‖ along the orbit.
    max_neg_lognorm: f64,
    count: usize,
    density: f64,
    /// Lower bound on the density from the orbit average and the extreme term.
    pliss_bound: f64,
    first_times: Vec<usize>,
    last_time: Option<usize>,
    #[serde(skip)]
    times: Vec<usize>,
}

fn hyptimes_at(k: u32, cfg: &RunConfig) -> da3_core::Result<(bool, HypTimesResult)> {
    let map = da_map(k, cfg)?;
    let st = orbit_stats(&map, &orbit_start(cfg.seed, 0), cfg.n, cfg.burn_in, true)?;
    let a_emp = 0.5 * (st.mean_log_det_cu() - map.unstable_factor().ln()).min(st.mean_log_center());
    let rate = cfg.rate.unwrap_or(0.5 * a_emp);
    let times = if rate > 0.0 { hyperbolic_times(&st.lognorms, rate) } else { Vec::new() };
    let mean = st.sum_log_inv_cu / st.n as f64;
    let big_a = st.lognorms.iter().map(|l| -l).fold(f64::NEG_INFINITY, f64::max);
    let c = -mean;
    let pliss_bound = if c > rate && big_a > rate { (c - rate) / (big_a - rate) } else { 0.0 };
    let density = times.len() as f64 / st.n as f64;
    let r = HypTimesResult {
        n: st.n,
        burn_in: st.burn_in,
        a_emp,
        rate,
        mean_lognorm: mean,
        max_neg_lognorm: big_a,
        count: times.len(),
        density,
        pliss_bound,
        first_times: times.iter().take(LISTED_TIMES).copied().collect(),
        last_time: times.last().copied(),
        times,
    };
    Ok((rate > 0.0 && density > 0.0 && density >= pliss_bound, r))
}

pub(super) fn run_hyptimes(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = sweep(cfg.k, |k| hyptimes_at(k, cfg))?;
    Ok(finish(cmd, cfg, rows, HYPTIMES_HEADER, |k, r, out| {
        for t in &r.times {
            writeln!(out, "{k},{t}").expect("string write");
        }
    }))
}
