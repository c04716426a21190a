//! Density of traced leaves, the u-section crossing window and backward
//! convergence inside center-unstable planes.

use super::field::SegmentCloud;
use super::leaf::LeafSegment;
use crate::damap::{TorusMap, TorusPoint};
use crate::error::{Error, Result};
use crate::hyperbolicity::{unstable_slope, ConeParams};
use crate::linalg::Vec3;
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

pub const MIN_GRID: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    /// Max over the grid of the torus distance to the leaf.
    pub epsilon: f64,
    pub grid_n: usize,
    pub leaf_length: f64,
}

pub fn density_probe<S: Real>(leaf: &LeafSegment<S>, grid_n: usize) -> Result<DensityReport> {
    if grid_n < MIN_GRID {
        return Err(Error::ParameterOutOfRange(format!("grid_n={grid_n} < {MIN_GRID}")));
    }
    if leaf.points.is_empty() {
        return Err(Error::ParameterOutOfRange("empty leaf".into()));
    }
    let pieces = leaf.pieces();
    let cells = ((pieces.len() as f64).cbrt().ceil() as usize).clamp(4, 128);
    let cloud = SegmentCloud::new(pieces, cells);
    Ok(DensityReport {
        epsilon: cloud.max_grid_distance(grid_n).f64(),
        grid_n,
        leaf_length: leaf.length().f64(),
    })
}

/// ε at each requested length, measured on prefixes of one traced leaf.
pub fn density_curve<S: Real>(leaf: &LeafSegment<S>, lengths: &[S], grid_n: usize) -> Result<Vec<DensityReport>> {
    lengths
        .iter()
        .map(|&l| density_probe(&leaf.prefix(l), grid_n))
        .collect()
}

/// CSV with header `L,epsilon`.
pub fn density_csv(curve: &[DensityReport]) -> String {
    let mut out = String::from("L,epsilon\n");
    for r in curve {
        writeln!(out, "{:.17e},{:.17e}", r.leaf_length, r.epsilon).expect("string write");
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct USectionOptions {
    pub samples: usize,
    pub seed: u64,
    pub pullbacks: usize,
    /// Every `check_every`-th sample is re-integrated at half step to
    /// estimate the integrator error.
    pub check_every: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct USectionReport {
    pub k: u32,
    pub samples: usize,
    pub ku: f64,
    pub ks: f64,
    pub b: f64,
    pub step: f64,
    pub pullbacks: usize,
    /// b − Ks: crossings with |y| below this lie on stable leaves through I_k.
    pub stable_window: f64,
    /// ⅔(1 + Ku) < b − Ks: the cone widths alone place every crossing.
    pub cone_inclusion: bool,
    pub max_drift: f64,
    /// max of |y_cross − ζ_y| / (Ku·|ζ_x|).
    pub max_drift_ratio: f64,
    pub max_abs_crossing: f64,
    pub inside_cone_window: usize,
    pub inside_stable_window: usize,
    /// max |y(h) − y(h/2)| over re-integrated samples.
    pub integrator_error: f64,
    pub pass: bool,
}

/// y where the unstable leaf through the B-point ζ meets x = 0, by Heun steps
/// in x with z fixed.
fn crossing<S: Real, M: TorusMap<S> + ?Sized>(map: &M, zeta: Vec3<S>, h: S, pullbacks: usize) -> Result<S> {
    let extent = zeta[0].abs();
    if extent > S::lit(2.0) {
        return Err(Error::TraceLength(format!(
            "x-extent {:.3} exceeds 2 before reaching the YZ-plane",
            extent.f64()
        )));
    }
    let p = map.frame().p;
    let slope_at = |x: S, y: S| unstable_slope(map, &TorusPoint::project(p.mul_vec(Vec3::new(x, y, zeta[2]))), pullbacks);
    let steps = (extent / h).ceil().to_usize().unwrap_or(0).max(1);
    let dx = -zeta[0] / S::int(steps as i64);
    let (mut x, mut y) = (zeta[0], zeta[1]);
    let mut v = slope_at(x, y)?;
    for i in 0..steps {
        let x_next = if i + 1 == steps { S::zero() } else { x + dx };
        let v_pred = slope_at(x_next, y + v * dx)?;
        y = y + (v + v_pred) * (dx * S::lit(0.5));
        x = x_next;
        v = slope_at(x, y)?;
    }
    Ok(y)
}

/// Samples ζ ∈ [−⅔, ⅔]³ in B-coordinates and checks where its unstable leaf
/// crosses the YZ-plane.
pub fn u_section_probe<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    k: u32,
    cones: &ConeParams<S>,
    b: S,
    step: S,
    opts: &USectionOptions,
) -> Result<USectionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let two_thirds = 2.0 / 3.0;
    let window = (b - cones.ks).f64();
    let ku = cones.ku.f64();
    let mut rep = USectionReport {
        k,
        samples: opts.samples,
        ku,
        ks: cones.ks.f64(),
        b: b.f64(),
        step: step.f64(),
        pullbacks: opts.pullbacks,
        stable_window: window,
        cone_inclusion: two_thirds * (1.0 + ku) < window,
        max_drift: 0.0,
        max_drift_ratio: 0.0,
        max_abs_crossing: 0.0,
        inside_cone_window: 0,
        inside_stable_window: 0,
        integrator_error: 0.0,
        pass: false,
    };
    for i in 0..opts.samples {
        let mut g = || S::lit(rng.gen_range(-two_thirds..=two_thirds));
        let zeta = Vec3::new(g(), g(), g());
        let y = crossing(map, zeta, step, opts.pullbacks)?;
        if opts.check_every > 0 && i % opts.check_every == 0 {
            let fine = crossing(map, zeta, step * S::lit(0.5), opts.pullbacks)?;
            rep.integrator_error = rep.integrator_error.max((y - fine).abs().f64());
        }
        let drift = (y - zeta[1]).abs().f64();
        let allowed = ku * zeta[0].abs().f64();
        rep.max_drift = rep.max_drift.max(drift);
        if allowed > 0.0 {
            rep.max_drift_ratio = rep.max_drift_ratio.max(drift / allowed);
        }
        rep.max_abs_crossing = rep.max_abs_crossing.max(y.abs().f64());
        if drift <= allowed {
            rep.inside_cone_window += 1;
        }
        if y.abs().f64() < window {
            rep.inside_stable_window += 1;
        }
    }
    rep.pass = opts.samples > 0
        && rep.inside_cone_window == opts.samples
        && rep.inside_stable_window == opts.samples;
    Ok(rep)
}

/// Distance below which backward orbits count as merged.
pub const CONVERGED: f64 = 1e-6;
/// Growth factor over the initial distance reported as divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// d(f⁻ⁿx, f⁻ⁿy) for n = 0..=steps taken.
    pub distances: Vec<f64>,
    /// First n with distance below the threshold.
    pub converged_at: Option<usize>,
    pub monotone_tail: bool,
    pub diverged: bool,
    pub pass: bool,
}

/// Iterates x and y backward, holding y in the center-unstable plane of x by
/// zeroing the B-z component of their displacement after each step.
pub fn backward_convergence_probe<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    x: &TorusPoint<S>,
    y: &TorusPoint<S>,
    n_max: usize,
) -> Result<ConvergenceReport> {
    let frame = map.frame();
    let (p, p_inv) = (frame.p, frame.p_inv);
    let d0 = x.distance(y).f64();
    let mut distances = vec![d0];
    let (mut a, mut b) = (*x, *y);
    let mut converged_at = (d0 < CONVERGED).then_some(0);
    let mut diverged = false;
    for n in 1..=n_max {
        if converged_at.is_some() {
            break;
        }
        a = map.backward(&a)?;
        b = map.backward(&b)?;
        let mut delta = p_inv.mul_vec(a.delta(&b));
        delta[2] = S::zero();
        b = TorusPoint::project(a.coords() + p.mul_vec(delta));
        let d = a.distance(&b).f64();
        distances.push(d);
        if d < CONVERGED {
            converged_at = Some(n);
        }
        if d > DIVERGENCE_FACTOR * d0 {
            diverged = true;
        }
    }
    let half = distances.len() / 2;
    let monotone_tail = distances.len() > 2 && distances[half..].windows(2).all(|w| w[1] < w[0]);
    Ok(ConvergenceReport {
        pass: converged_at.is_some() || monotone_tail,
        distances,
        converged_at,
        monotone_tail,
        diverged,
    })
}
