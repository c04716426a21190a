//! Line-field estimates for E^u ⊂ XY and E^s ⊂ YZ by cone pullback.
//!
//! Both fields are graphs over the strong axis in B-coordinates: E^u at p is
//! spanned by (1, v, 0) and E^s by (0, u, 1).

use crate::damap::{TorusMap, TorusPoint};
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::scalar::Real;

/// Default number of pullback steps.
pub const PULLBACKS: usize = 30;

/// Pullbacks needed for the slope iteration, contracting by at most `rate`
/// per step, to reach `tol` from an O(1) start; capped at [`PULLBACKS`].
pub fn default_pullbacks(rate: f64, tol: f64) -> usize {
    if !(rate > 0.0 && rate < 1.0) {
        return PULLBACKS;
    }
    ((tol.ln() / rate.ln()).ceil() as usize + 1).clamp(2, PULLBACKS)
}

/// One forward step of the unstable slope: (1, v) ↦ Df·(1, v) rescaled.
#[inline]
pub fn push_unstable<S: Real>(d: &Mat3<S>, v: S) -> S {
    (d.0[1][0] + d.0[1][1] * v) / d.0[0][0]
}

/// One backward step of the stable slope: (u, 1) ↦ Df⁻¹·(u, 1) rescaled.
#[inline]
fn pull_stable<S: Real>(d: &Mat3<S>, u: S) -> S {
    (u * d.0[2][2] - d.0[1][2]) / d.0[1][1]
}

fn finite<S: Real>(x: S, what: &str) -> Result<S> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Precision(format!("{what} slope is not finite")))
    }
}

/// Slope v of E^u at p: start with v = 0 at f^{−n}(p) and push forward along
/// the stored backward orbit.
pub fn unstable_slope<S: Real, M: TorusMap<S> + ?Sized>(map: &M, p: &TorusPoint<S>, n: usize) -> Result<S> {
    let mut back = Vec::with_capacity(n);
    let mut q = *p;
    for _ in 0..n {
        q = map.backward(&q)?;
        back.push(q);
    }
    let mut v = S::zero();
    for q in back.iter().rev() {
        v = push_unstable(&map.derivative(q)?, v);
    }
    finite(v, "unstable")
}

/// Slope u of E^s at p: start with u = 0 at f^n(p) and pull back along the
/// forward orbit.
pub fn stable_slope<S: Real, M: TorusMap<S> + ?Sized>(map: &M, p: &TorusPoint<S>, n: usize) -> Result<S> {
    let mut ders = Vec::with_capacity(n);
    let mut q = *p;
    for _ in 0..n {
        let (next, d) = map.step(&q)?;
        ders.push(d);
        q = next;
    }
    let mut u = S::zero();
    for d in ders.iter().rev() {
        u = pull_stable(d, u);
    }
    finite(u, "stable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damap::{DAMap, LinearAnosov};
    use crate::hyperbolicity::cone_constants;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_slopes_vanish() {
        let m = LinearAnosov::<f64>::new(7).unwrap();
        let p = TorusPoint::new(0.3, 0.1, 0.7);
        assert_eq!(unstable_slope(&m, &p, 30).unwrap(), 0.0);
        assert_eq!(stable_slope(&m, &p, 30).unwrap(), 0.0);
    }

    #[test]
    fn pullback_count() {
        assert_eq!(default_pullbacks(0.05, 1e-16), 14);
        assert_eq!(default_pullbacks(1e-4, 1e-17), 6);
        assert_eq!(default_pullbacks(1.5, 1e-16), PULLBACKS);
    }

    #[test]
    fn slopes_stay_in_cones_and_converge() {
        let m = DAMap::<f64>::for_k(20).unwrap();
        let c = cone_constants(&m.params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = TorusPoint::new(rng.gen(), rng.gen(), rng.gen());
            let v30 = unstable_slope(&m, &p, 30).unwrap();
            let v31 = unstable_slope(&m, &p, 31).unwrap();
            assert!(v30.abs() <= c.ku);
            assert!((v30 - v31).abs() <= 1e-9 * (1.0 + v30.abs()));
            let u30 = stable_slope(&m, &p, 30).unwrap();
            let u31 = stable_slope(&m, &p, 31).unwrap();
            assert!(u30.abs() <= c.ks);
            assert!((u30 - u31).abs() <= 1e-9 * (1.0 + u30.abs()));
        }
    }

    #[test]
    fn successive_slopes_within_geometric_bound() {
        // One extra pullback adds a first push of size ≤ M, then n pushes
        // each contracting by at most Θ.
        let m = DAMap::<f64>::for_k(20).unwrap();
        let c = cone_constants(&m.params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for i in 0..300 {
            let p = if i % 3 == 0 {
                m.preimage_of_tube_point(crate::linalg::Vec3::new(
                    rng.gen_range(-0.01..0.01),
                    rng.gen_range(-60.0..60.0),
                    rng.gen_range(-0.01..0.01),
                ))
            } else {
                TorusPoint::new(rng.gen(), rng.gen(), rng.gen())
            };
            let v: Vec<f64> = (0..10).map(|n| unstable_slope(&m, &p, n).unwrap()).collect();
            for n in 0..9 {
                let bound = c.theta.powi(n as i32) * c.m;
                assert!((v[n + 1] - v[n]).abs() <= bound * (1.0 + 1e-12) + 1e-15, "n={n}");
            }
        }
    }

    #[test]
    fn unstable_field_is_invariant() {
        // Df maps E^u(p) onto E^u(f p).
        let m = DAMap::<f64>::for_k(12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = TorusPoint::new(rng.gen(), rng.gen(), rng.gen());
            let (q, d) = m.step(&p).unwrap();
            let pushed = push_unstable(&d, unstable_slope(&m, &p, 30).unwrap());
            let direct = unstable_slope(&m, &q, 30).unwrap();
            assert!((pushed - direct).abs() <= 1e-8 * (1.0 + direct.abs()));
        }
    }
}
