use super::slopes::{push_unstable, unstable_slope};
use super::times::hyperbolic_times;
use crate::damap::{TorusMap, TorusPoint};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Tolerance on the log-scale contraction margin.
pub const CONTRACTION_TOL: f64 = 1e-9;

/// Half-angle of the center-unstable cone around the XY-plane.
const CU_CONE_HALF_ANGLE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub n: usize,
    pub delta1: f64,
    pub rate: f64,
    pub samples: usize,
    /// Whether n is a `rate`-hyperbolic time of x on the recorded lognorms.
    pub hyperbolic_time: bool,
    /// min over samples and k of (log d_n − k·rate) − log d_{n−k}.
    pub min_log_margin: f64,
    /// The k at which the minimum occurs.
    pub worst_k: usize,
    pub pass: bool,
}

/// Distance in the metric where E^u = (1, v, 0) and F = (0, 1, 0) are
/// orthonormal.
fn adapted_norm<S: Real>(delta: Vec3<S>, v: S) -> S {
    let (a, b) = (delta[0], delta[1] - v * delta[0]);
    (a * a + b * b).sqrt()
}

/// Samples y on the XY-disk of adapted radius ≤ `delta1` about f^n(x), pulls
/// y back n steps inside its center-unstable plane, and compares each
/// distance with e^{−k·rate} times the distance at time n.
#[allow(clippy::too_many_arguments)]
pub fn backward_contraction_check<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    x: &TorusPoint<S>,
    n: usize,
    rate: S,
    delta1: S,
    samples: usize,
    n_pb: usize,
    seed: u64,
) -> Result<ContractionReport> {
    if n == 0 || !(delta1 > S::zero()) || !(rate > S::zero()) {
        return Err(Error::ParameterOutOfRange(
            "need n ≥ 1, δ1 > 0 and a positive rate".into(),
        ));
    }
    let frame = map.frame();
    let (p, p_inv): (Mat3<S>, Mat3<S>) = (frame.p, frame.p_inv);

    let mut orbit = Vec::with_capacity(n + 1);
    let mut slopes = Vec::with_capacity(n + 1);
    let mut lognorms = Vec::with_capacity(n);
    let mut q = *x;
    let mut v = unstable_slope(map, x, n_pb)?;
    for _ in 0..n {
        let (next, d) = map.step(&q)?;
        orbit.push(q);
        slopes.push(v);
        lognorms.push(-(d.0[0][0].abs().min(d.0[1][1].abs())).ln());
        v = push_unstable(&d, v);
        q = next;
    }
    orbit.push(q);
    slopes.push(v);
    let hyperbolic_time = hyperbolic_times(&lognorms, rate).last() == Some(&n);

    let tan_half = S::lit(CU_CONE_HALF_ANGLE.tan());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_margin = f64::INFINITY;
    let mut worst_k = 0;
    for _ in 0..samples {
        let r = delta1 * S::lit(rng.gen::<f64>().sqrt().max(1e-3));
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let (al, be) = (r * S::lit(phi.cos()), r * S::lit(phi.sin()));
        let d_n = Vec3::new(al, be + slopes[n] * al, S::zero());
        let log_dn = adapted_norm(d_n, slopes[n]).ln();
        let mut y = TorusPoint::project(orbit[n].coords() + p.mul_vec(d_n));
        for k in 1..=n {
            let base = &orbit[n - k];
            y = map.backward(&y)?;
            let mut delta = p_inv.mul_vec(base.delta(&y));
            let planar = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt();
            if delta[2].abs() > tan_half * planar {
                return Err(Error::Geometry(format!(
                    "pulled-back disk left the center-unstable cone at k={k}"
                )));
            }
            delta[2] = S::zero();
            y = TorusPoint::project(base.coords() + p.mul_vec(delta));
            let margin = (log_dn - rate * S::int(k as i64) - adapted_norm(delta, slopes[n - k]).ln()).f64();
            if margin < min_margin {
                min_margin = margin;
                worst_k = k;
            }
        }
    }
    Ok(ContractionReport {
        n,
        delta1: delta1.f64(),
        rate: rate.f64(),
        samples,
        hyperbolic_time,
        min_log_margin: min_margin,
        worst_k,
        pass: samples > 0 && min_margin >= -CONTRACTION_TOL,
    })
}

/// Halves δ1 from `start` until the check passes; None after `max_halvings`.
#[allow(clippy::too_many_arguments)]
pub fn find_delta1<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    x: &TorusPoint<S>,
    n: usize,
    rate: S,
    start: S,
    max_halvings: usize,
    samples: usize,
    n_pb: usize,
    seed: u64,
) -> Result<Option<ContractionReport>> {
    let mut delta = start;
    for _ in 0..=max_halvings {
        let rep = backward_contraction_check(map, x, n, rate, delta, samples, n_pb, seed)?;
        if rep.pass {
            return Ok(Some(rep));
        }
        delta = delta * S::lit(0.5);
    }
    Ok(None)
}
