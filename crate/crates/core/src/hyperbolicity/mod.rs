//! Cone criteria, exponents and hyperbolic times for f_k.

mod cones;
mod contraction;
mod orbit;
mod slopes;
mod times;

pub use cones::{
    check_cone_invariance, check_cone_invariance_at, check_volume_domination,
    check_volume_domination_at, generic_dominated_splitting_check, sample_points, splitting_at,
    ConeReport, DominatedSplitting, SplittingReport, VolumeReport,
};
pub use contraction::{backward_contraction_check, find_delta1, ContractionReport};
pub use orbit::{
    birkhoff_check, lyapunov_exponents, orbit_stats, orbit_start, BirkhoffReport, Exponents,
    OrbitStats,
};
pub use slopes::{default_pullbacks, push_unstable, stable_slope, unstable_slope, PULLBACKS};
pub use times::{hyperbolic_times, hyperbolic_times_brute, pliss_density, HyperbolicTimeParams};

use crate::damap::DAParams;
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Widths of the unstable cone |v|/|u| ≤ Ku in the XY-plane and the stable
/// cone |u|/|v| ≤ Ks in the YZ-plane, with the constants that produce them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeParams<S> {
    pub ku: S,
    pub ks: S,
    pub theta: S,
    pub m: S,
    pub theta_p: S,
    pub m_p: S,
}

impl<S: Real> ConeParams<S> {
    /// Same constants with both widths multiplied by `s`.
    pub fn scaled(&self, s: S) -> Self {
        ConeParams {
            ku: self.ku * s,
            ks: self.ks * s,
            ..*self
        }
    }

    /// Bound ((1+Θ)/(1−Θ))·M on the image slope of the unstable cone.
    pub fn unstable_image_bound(&self) -> S {
        (S::one() + self.theta) / (S::one() - self.theta) * self.m
    }

    /// Bound ((1+Θ')/(1−Θ'))·M' on the image slope of the stable cone.
    pub fn stable_image_bound(&self) -> S {
        (S::one() + self.theta_p) / (S::one() - self.theta_p) * self.m_p
    }

    pub fn cast<T: Real>(&self) -> ConeParams<T> {
        ConeParams {
            ku: self.ku.cast(),
            ks: self.ks.cast(),
            theta: self.theta.cast(),
            m: self.m.cast(),
            theta_p: self.theta_p.cast(),
            m_p: self.m_p.cast(),
        }
    }
}

pub fn cone_constants<S: Real>(p: &DAParams<S>) -> Result<ConeParams<S>> {
    let s = &p.spectrum;
    let (lu, lc, ls) = (s.lambda_u, s.lambda_c, s.lambda_s);
    let t = &p.tube;
    let shear = S::lit(8.0) * t.b / t.d * t.c.abs();
    let ratio = lc / lu;
    let theta = S::lit(6.0) * ratio * ratio;
    let theta_p = ls * ls;
    if !(theta < S::one()) {
        return Err(Error::KTooSmall {
            k: p.k,
            reason: format!("Θ = 6(λc/λu)² = {:.6} ≥ 1", theta.f64()),
        });
    }
    if !(theta_p < S::one()) {
        return Err(Error::KTooSmall {
            k: p.k,
            reason: format!("Θ' = (λs)² = {:.6} ≥ 1", theta_p.f64()),
        });
    }
    let m = ratio * shear;
    let m_p = ls * lc * shear;
    let two = S::lit(2.0);
    Ok(ConeParams {
        ku: two * m / (S::one() - theta),
        ks: two * m_p / (S::one() - theta_p),
        theta,
        m,
        theta_p,
        m_p,
    })
}

/// Smallest k in `from..=to` at which every ζ ∈ [−⅔, ⅔]³ is guaranteed by
/// the cone widths alone to cross the YZ-plane inside the stable window:
/// ⅔(1 + Ku) < b − Ks.
pub fn u_section_threshold(from: u32, to: u32) -> Option<u32> {
    (from..=to).find(|&k| {
        crate::damap::default_params::<f64>(k)
            .and_then(|p| Ok((cone_constants(&p)?, p.tube.b)))
            .map(|(c, b)| 2.0 / 3.0 * (1.0 + c.ku) < b - c.ks)
            .unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damap::default_params;

    #[test]
    fn k20_constants_match_formulas() {
        let p = default_params::<f64>(20).unwrap();
        let c = cone_constants(&p).unwrap();
        let s = &p.spectrum;
        let r = s.lambda_c / s.lambda_u;
        let shear = 8.0 * p.tube.b / p.tube.d * p.tube.c.abs();
        assert!((c.theta - 6.0 * r * r).abs() < 1e-15);
        let ku = 16.0 * r * p.tube.b / p.tube.d * p.tube.c.abs() / (1.0 - 6.0 * r * r);
        assert!((c.ku - ku).abs() <= 1e-12 * ku);
        let ks = 16.0 * s.lambda_s * s.lambda_c * p.tube.b / p.tube.d * p.tube.c.abs()
            / (1.0 - s.lambda_s.powi(2));
        assert!((c.ks - ks).abs() <= 1e-12 * ks);
        assert!(c.unstable_image_bound() < c.ku);
        assert!(c.stable_image_bound() < c.ks);
        assert!((c.m - r * shear).abs() <= 1e-12 * c.m);
    }

    #[test]
    fn ku_within_ctilde_bound() {
        // |c|/d ≤ 8 gives C̃ = 16·8/(1−Θ) with Θ ≤ 6(λc/λu)² at the smallest k.
        for k in [6, 10, 20, 40] {
            let p = default_params::<f64>(k).unwrap();
            let c = cone_constants(&p).unwrap();
            let s = &p.spectrum;
            let c_tilde = 16.0 * 8.0 / (1.0 - c.theta);
            assert!(c.ku <= c_tilde * s.lambda_c / s.lambda_u * p.tube.b * (1.0 + 1e-12));
            assert!(c.ks <= c_tilde * s.lambda_s * s.lambda_c * p.tube.b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn widths_shrink_relative_to_b() {
        let ratio = |k| {
            let p = default_params::<f64>(k).unwrap();
            let c = cone_constants(&p).unwrap();
            c.ku.max(c.ks) / p.tube.b
        };
        assert!(ratio(40) < ratio(20));
        assert!(ratio(80) < ratio(40));
    }
}
