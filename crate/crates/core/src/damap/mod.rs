//! The DA map f_k = A_k∘ψ_k∘A_k on the 3-torus.

mod bset;
mod dynamics;
mod index;
mod manifest;
mod map;
pub(crate) mod torus;

pub use bset::{b_set_check, BSetReport, LOCUS_TOL};
pub use dynamics::{LinearAnosov, TorusMap};
pub use index::{TubeHit, TubeIndex};
pub use manifest::{sha256_hex, MapManifest, MAP_SCHEMA};
pub use map::{DAMap, Segment, B_SET_TOL};
pub use torus::{min_image, reduce, LiftPoint, TorusPoint};

use crate::anosov::{frame_for_k, EigenFrame, Spectrum, MIN_K};
use crate::error::{Error, Result};
use crate::foliation::lattice::{a_tilde, certify_tube, LatticeCertificate};
use crate::perturbation::TubeParams;
use crate::scalar::Real;

/// Parameters of f_k.
#[derive(Clone, Debug)]
pub struct DAParams<S> {
    pub k: u32,
    pub spectrum: Spectrum<S>,
    pub frame: EigenFrame<S>,
    pub theta: S,
    pub tube: TubeParams<S>,
    pub certificate: LatticeCertificate,
}

/// a = ½·floor(1/(λc−1))·|v^c|.
pub fn default_half_length<S: Real>(spec: &Spectrum<S>, frame: &EigenFrame<S>) -> S {
    a_tilde(spec.lambda_c) * frame.v_c.norm()
}

/// Admissible θ ∈ (1/a, 1/λc].
pub fn theta_interval<S: Real>(a: S, lambda_c: S) -> (S, S) {
    (a.recip(), lambda_c.recip())
}

/// Default parameters with θ at the midpoint of its admissible interval.
pub fn default_params<S: Real>(k: u32) -> Result<DAParams<S>> {
    params_with_theta(k, None)
}

pub fn params_with_theta<S: Real>(k: u32, theta: Option<S>) -> Result<DAParams<S>> {
    if k < MIN_K {
        return Err(Error::ParameterOutOfRange(format!("k={k} < {MIN_K}")));
    }
    let (spectrum, frame) = frame_for_k::<S>(k)?;
    let lc = spectrum.lambda_c;
    let a = default_half_length(&spectrum, &frame);
    let (lo, hi) = theta_interval(a, lc);
    if !(a > S::one() && lo < hi) {
        return Err(Error::Infeasible {
            k,
            reason: format!(
                "no θ ≤ 1/λc = {:.6} gives b = θa > 1 (a = {:.6})",
                hi.f64(),
                a.f64()
            ),
        });
    }
    let theta = match theta {
        None => (lo + hi) / S::lit(2.0),
        Some(t) if t > lo && t <= hi => t,
        Some(t) => {
            return Err(Error::ParameterOutOfRange(format!(
                "θ={} outside ({}, {}]",
                t.f64(),
                lo.f64(),
                hi.f64()
            )))
        }
    };
    let b = theta * a;
    let c = lc.powi(-2) - S::one();
    let d = (lc - S::one()) / S::lit(4.0);
    let tube = TubeParams::new(a, b, c, d)?;
    let certificate = certify_tube(k, &frame, a, d);
    if !certificate.pass {
        return Err(Error::Infeasible {
            k,
            reason: format!(
                "tube translates overlap: gap {:.6} vs 2d {:.6}, cross-section diameter {:.6}",
                certificate.gap.distance, certificate.two_d, certificate.cross_section_diameter
            ),
        });
    }
    Ok(DAParams {
        k,
        spectrum,
        frame,
        theta,
        tube,
        certificate,
    })
}

/// Smallest k in [5, k_max] with feasible default parameters.
pub fn smallest_feasible_k(k_max: u32) -> Option<u32> {
    (MIN_K..=k_max).find(|&k| default_params::<f64>(k).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k5_infeasible() {
        let err = default_params::<f64>(5).unwrap_err();
        assert!(matches!(err, Error::Infeasible { k: 5, .. }), "{err}");
        let (spec, frame) = frame_for_k::<f64>(5).unwrap();
        let a = default_half_length(&spec, &frame);
        assert!((a - 1.0795).abs() < 1e-3);
        assert!(a / spec.lambda_c < 1.0);
    }

    #[test]
    fn k20_regression_anchor() {
        let p = default_params::<f64>(20).unwrap();
        assert!((p.tube.a - 136.418).abs() < 1e-3, "a={}", p.tube.a);
        assert!((p.tube.d - 0.014709).abs() < 1e-6, "d={}", p.tube.d);
        assert!((p.tube.c + 0.10804).abs() < 1e-5, "c={}", p.tube.c);
        assert!(p.tube.b > 1.0 && p.theta <= 1.0 / p.spectrum.lambda_c);
        assert!(p.certificate.pass);
    }

    #[test]
    fn shear_ratio_bounded() {
        for k in 6..60 {
            let p = default_params::<f64>(k).unwrap();
            assert!(p.tube.c.abs() / p.tube.d <= 8.0);
        }
    }

    #[test]
    fn theta_override_checked() {
        assert!(params_with_theta::<f64>(20, Some(2.0)).is_err());
        let p = params_with_theta::<f64>(20, Some(0.5)).unwrap();
        assert_eq!(p.theta, 0.5);
    }

    #[test]
    fn smallest_feasible() {
        assert_eq!(smallest_feasible_k(64), Some(6));
    }
}
