//! Sampled check of B(f) = {det_cu ≤ (λu)²}.

use super::map::DAMap;
use super::torus::{LiftPoint, TorusPoint};
use crate::error::Result;
use crate::linalg::Vec3;
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Relative tolerance for det_cu = (λu)² on the equality locus.
pub const LOCUS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BSetReport {
    pub off_support_samples: usize,
    /// Off-support samples where det_cu differs from (λuλc)² in any bit.
    pub off_support_mismatches: usize,
    pub off_support_members: usize,
    pub locus_samples: usize,
    /// max |det_cu − (λu)²| / (λu)² on t·e^c, |t| ≤ b/λc.
    pub max_locus_error: f64,
    pub locus_non_members: usize,
    /// In-tube samples off the center axis.
    pub off_axis_samples: usize,
    pub off_axis_members: usize,
    /// Half-lengths of the computed locus A⁻¹(I_k) and of I_k.
    pub locus_half_length: f64,
    pub segment_i_half_length: f64,
    /// Samples on I_k outside A⁻¹(I_k) that are members. These sit where the
    /// mollified ramp is still within the tolerance of flat.
    pub gap_members: usize,
    pub gap_samples: usize,
    /// Largest |t| − b/λc among gap members.
    pub max_gap_member_offset: f64,
    pub pass: bool,
}

/// `n` samples of each kind: uniform points off the support, points on the
/// computed equality locus, and in-tube points off the axis.
pub fn b_set_check<S: Real>(map: &DAMap<S>, n: usize, seed: u64) -> Result<BSetReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = &map.params.spectrum;
    let lu2 = s.lambda_u.powi(2);
    let full = (s.lambda_u * s.lambda_c).powi(2);
    let e_c = map.params.frame.e_c;
    let (a, b, d) = (map.params.tube.a, map.params.tube.b, map.params.tube.d);
    let locus = map.equality_locus().half_length;

    let mut rep = BSetReport {
        off_support_samples: 0,
        off_support_mismatches: 0,
        off_support_members: 0,
        locus_samples: n,
        max_locus_error: 0.0,
        locus_non_members: 0,
        off_axis_samples: n,
        off_axis_members: 0,
        locus_half_length: locus.f64(),
        segment_i_half_length: b.f64(),
        gap_members: 0,
        gap_samples: n,
        max_gap_member_offset: 0.0,
        pass: false,
    };

    while rep.off_support_samples < n {
        let p = TorusPoint::new(S::lit(rng.gen()), S::lit(rng.gen()), S::lit(rng.gen()));
        if map.in_tube(&map.apply_a(&p))?.is_some() {
            continue;
        }
        rep.off_support_samples += 1;
        if map.det_cu(&p)? != full {
            rep.off_support_mismatches += 1;
        }
        if map.b_set_member(&p)? {
            rep.off_support_members += 1;
        }
    }

    for _ in 0..n {
        let t = locus * S::lit(rng.gen_range(-1.0..=1.0));
        let p = LiftPoint(e_c * t).project();
        let err = ((map.det_cu(&p)? - lu2).abs() / lu2).f64();
        rep.max_locus_error = rep.max_locus_error.max(err);
        if !map.b_set_member(&p)? {
            rep.locus_non_members += 1;
        }
    }

    for _ in 0..n {
        let r = d * S::lit(rng.gen::<f64>().sqrt());
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let y = a * S::lit(rng.gen_range(-1.0..=1.0));
        let local = Vec3::new(r * S::lit(phi.cos()), y, r * S::lit(phi.sin()));
        if map.b_set_member(&map.preimage_of_tube_point(local))? {
            rep.off_axis_members += 1;
        }
    }

    for _ in 0..n {
        let t = locus + (b - locus) * S::lit(rng.gen_range(0.0..1.0f64).max(1e-3));
        let sign = if rng.gen::<bool>() { S::one() } else { -S::one() };
        if map.b_set_member(&LiftPoint(e_c * (t * sign)).project())? {
            rep.gap_members += 1;
            rep.max_gap_member_offset = rep.max_gap_member_offset.max((t - locus).f64());
        }
    }

    rep.pass = n > 0
        && rep.off_support_mismatches == 0
        && rep.off_support_members == 0
        && rep.max_locus_error <= LOCUS_TOL
        && rep.locus_non_members == 0
        && rep.off_axis_members == 0;
    Ok(rep)
}
