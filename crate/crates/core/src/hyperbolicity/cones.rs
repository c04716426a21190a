use super::ConeParams;
use crate::damap::{DAMap, TorusMap, TorusPoint};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Share of samples placed so that A_k p lies inside the tube.
const TUBE_SHARE: usize = 10;

/// Seeded sample points: uniform on the torus, with every tenth point chosen
/// so that Tf at it sees the perturbation.
pub fn sample_points<S: Real>(map: &DAMap<S>, n: usize, seed: u64) -> Vec<TorusPoint<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = &map.params.tube;
    let (a, d) = (t.a.f64(), t.d.f64());
    (0..n)
        .map(|i| {
            if i % TUBE_SHARE == TUBE_SHARE - 1 {
                let r = d * rng.gen::<f64>().sqrt() * (1.0 - 1e-12);
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let y = rng.gen_range(-a..=a);
                let local = Vec3::new(S::lit(r * phi.cos()), S::lit(y), S::lit(r * phi.sin()));
                map.preimage_of_tube_point(local)
            } else {
                TorusPoint::new(S::lit(rng.gen()), S::lit(rng.gen()), S::lit(rng.gen()))
            }
        })
        .collect()
}

/// Worst margins of the unstable and stable cones over a sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub samples: usize,
    pub perturbed_samples: usize,
    pub ku: f64,
    pub ks: f64,
    /// min of Ku − |image slope| over boundary directions (1, ±Ku, 0).
    pub min_unstable_margin: f64,
    /// min of Ks − |preimage slope| over boundary directions (0, ±Ks, 1).
    pub min_stable_margin: f64,
    pub max_unstable_image_slope: f64,
    pub max_stable_image_slope: f64,
    pub unstable_image_bound: f64,
    pub stable_image_bound: f64,
    pub min_c2: f64,
    pub max_c2: f64,
    /// (λc)⁻² and 6.
    pub c2_bounds: [f64; 2],
    pub c2_bounds_hold: bool,
    pub pass: bool,
}

pub fn check_cone_invariance<S: Real>(
    map: &DAMap<S>,
    cones: &ConeParams<S>,
    n_samples: usize,
    seed: u64,
) -> Result<ConeReport> {
    check_cone_invariance_at(map, cones, &sample_points(map, n_samples, seed))
}

pub fn check_cone_invariance_at<S: Real>(
    map: &DAMap<S>,
    cones: &ConeParams<S>,
    points: &[TorusPoint<S>],
) -> Result<ConeReport> {
    let s = &map.params.spectrum;
    let (lu, lc, ls) = (s.lambda_u, s.lambda_c, s.lambda_s);
    let (ku, ks) = (cones.ku, cones.ks);
    let c2_lo = (lc * lc).recip();
    let c2_hi = S::lit(6.0);
    let mut rep = ConeReport {
        samples: points.len(),
        perturbed_samples: 0,
        ku: ku.f64(),
        ks: ks.f64(),
        min_unstable_margin: f64::INFINITY,
        min_stable_margin: f64::INFINITY,
        max_unstable_image_slope: 0.0,
        max_stable_image_slope: 0.0,
        unstable_image_bound: cones.unstable_image_bound().f64(),
        stable_image_bound: cones.stable_image_bound().f64(),
        min_c2: f64::INFINITY,
        max_c2: f64::NEG_INFINITY,
        c2_bounds: [c2_lo.f64(), c2_hi.f64()],
        c2_bounds_hold: true,
        pass: false,
    };
    for p in points {
        let j = map.jacobian_at(p)?;
        if j.c1 != S::zero() || j.c2 != S::one() || j.c3 != S::zero() {
            rep.perturbed_samples += 1;
        }
        let lc2c2 = lc * lc * j.c2;
        for sign in [S::one(), -S::one()] {
            let up = ((lc * lu * j.c1 + lc2c2 * sign * ku) / (lu * lu)).abs();
            rep.max_unstable_image_slope = rep.max_unstable_image_slope.max(up.f64());
            rep.min_unstable_margin = rep.min_unstable_margin.min((ku - up).f64());
            let sp = ((sign * ks * ls * ls - lc * ls * j.c3) / lc2c2).abs();
            rep.max_stable_image_slope = rep.max_stable_image_slope.max(sp.f64());
            rep.min_stable_margin = rep.min_stable_margin.min((ks - sp).f64());
        }
        rep.min_c2 = rep.min_c2.min(j.c2.f64());
        rep.max_c2 = rep.max_c2.max(j.c2.f64());
        if j.c2 < c2_lo || j.c2 > c2_hi {
            rep.c2_bounds_hold = false;
        }
    }
    rep.pass = !points.is_empty()
        && rep.min_unstable_margin > 0.0
        && rep.min_stable_margin > 0.0
        && rep.c2_bounds_hold;
    Ok(rep)
}

/// Log-scale margins of |det Tf|_YZ| < ‖Tf|_F‖ < |det Tf|_XY|.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub samples: usize,
    /// min of log|det Tf|_XY| − log‖Tf|_F‖.
    pub min_expanding_log_margin: f64,
    /// min of log‖Tf|_F‖ − log|det Tf|_YZ|.
    pub min_contracting_log_margin: f64,
    /// 2 log λu and −2 log λs.
    pub expected_log_margins: [f64; 2],
    pub pass: bool,
}

fn volume_margins<S: Real>(d: &Mat3<S>) -> (S, S) {
    let m = &d.0;
    let det_xy = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
    let det_yz = (m[1][1] * m[2][2] - m[1][2] * m[2][1]).abs();
    let n_f = m[1][1].abs();
    (det_xy.ln() - n_f.ln(), n_f.ln() - det_yz.ln())
}

pub fn check_volume_domination<S: Real>(map: &DAMap<S>, n_samples: usize, seed: u64) -> Result<VolumeReport> {
    check_volume_domination_at(map, &sample_points(map, n_samples, seed))
}

pub fn check_volume_domination_at<S: Real>(map: &DAMap<S>, points: &[TorusPoint<S>]) -> Result<VolumeReport> {
    let s = &map.params.spectrum;
    let two = S::lit(2.0);
    let mut rep = VolumeReport {
        samples: points.len(),
        min_expanding_log_margin: f64::INFINITY,
        min_contracting_log_margin: f64::INFINITY,
        expected_log_margins: [(two * s.lambda_u.ln()).f64(), (-two * s.lambda_s.ln()).f64()],
        pass: false,
    };
    for p in points {
        let (up, down) = volume_margins(&map.eval_df(p)?);
        rep.min_expanding_log_margin = rep.min_expanding_log_margin.min(up.f64());
        rep.min_contracting_log_margin = rep.min_contracting_log_margin.min(down.f64());
    }
    rep.pass = !points.is_empty() && rep.min_expanding_log_margin > 0.0 && rep.min_contracting_log_margin > 0.0;
    Ok(rep)
}

/// Invariant planes E and G, given by their normals in B-coordinates, with
/// constant-width cones C^E ⊂ E and C^G ⊂ G around the directions orthogonal
/// to F = E ∩ G.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominatedSplitting<S> {
    pub e_normal: Vec3<S>,
    pub g_normal: Vec3<S>,
    /// Cone in E: |f-component| ≤ k_e·|e₁-component|, invariant under Tf⁻¹.
    pub k_e: S,
    /// Cone in G: |f-component| ≤ k_g·|g₁-component|, invariant under Tf.
    pub k_g: S,
}

impl<S: Real> DominatedSplitting<S> {
    /// E = YZ, G = XY with the widths Ks and Ku.
    pub fn from_cones(cones: &ConeParams<S>) -> Self {
        DominatedSplitting {
            e_normal: Vec3::unit(0),
            g_normal: Vec3::unit(2),
            k_e: cones.ks,
            k_g: cones.ku,
        }
    }

    /// Orthonormal (e₁, f, g₁).
    fn basis(&self) -> Result<(Vec3<S>, Vec3<S>, Vec3<S>)> {
        let ne = self.e_normal.normalized();
        let ng = self.g_normal.normalized();
        let (ne, ng) = match (ne, ng) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InputGeometry("zero plane normal".into())),
        };
        let cross = ne.cross(ng);
        if cross.norm() < S::lit(1e-12) {
            return Err(Error::InputGeometry("E and G are not transverse".into()));
        }
        let f = cross.normalized().expect("nonzero");
        let e1 = ne.cross(f).normalized().expect("unit factors");
        let g1 = ng.cross(f).normalized().expect("unit factors");
        Ok((e1, f, g1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub samples: usize,
    pub k_e: f64,
    pub k_g: f64,
    pub min_g_margin: f64,
    pub min_e_margin: f64,
    pub min_expanding_log_margin: f64,
    pub min_contracting_log_margin: f64,
    /// Largest relative component of a cone image normal to its plane.
    pub max_plane_leak: f64,
    pub pass: bool,
}

fn plane_det<S: Real>(d: &Mat3<S>, u: Vec3<S>, f: Vec3<S>) -> S {
    let (du, df) = (d.mul_vec(u), d.mul_vec(f));
    u.dot(du) * f.dot(df) - u.dot(df) * f.dot(du)
}

pub fn generic_dominated_splitting_check<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    split: &DominatedSplitting<S>,
    n_samples: usize,
    seed: u64,
) -> Result<SplittingReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<_> = (0..n_samples)
        .map(|_| TorusPoint::new(S::lit(rng.gen()), S::lit(rng.gen()), S::lit(rng.gen())))
        .collect();
    splitting_at(map, split, &pts)
}

pub fn splitting_at<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    split: &DominatedSplitting<S>,
    points: &[TorusPoint<S>],
) -> Result<SplittingReport> {
    let (e1, f, g1) = split.basis()?;
    let ng = split.g_normal.normalized().expect("checked");
    let ne = split.e_normal.normalized().expect("checked");
    let mut rep = SplittingReport {
        samples: points.len(),
        k_e: split.k_e.f64(),
        k_g: split.k_g.f64(),
        min_g_margin: f64::INFINITY,
        min_e_margin: f64::INFINITY,
        min_expanding_log_margin: f64::INFINITY,
        min_contracting_log_margin: f64::INFINITY,
        max_plane_leak: 0.0,
        pass: false,
    };
    for p in points {
        let d = map.derivative(p)?;
        let d_inv = d
            .inverse()
            .ok_or_else(|| Error::Precision("singular derivative".into()))?;
        for sign in [S::one(), -S::one()] {
            let w = d.mul_vec(g1 + f * (sign * split.k_g));
            let slope = (w.dot(f) / w.dot(g1)).abs();
            rep.min_g_margin = rep.min_g_margin.min((split.k_g - slope).f64());
            rep.max_plane_leak = rep.max_plane_leak.max((w.dot(ng).abs() / w.norm()).f64());
            let w = d_inv.mul_vec(e1 + f * (sign * split.k_e));
            let slope = (w.dot(f) / w.dot(e1)).abs();
            rep.min_e_margin = rep.min_e_margin.min((split.k_e - slope).f64());
            rep.max_plane_leak = rep.max_plane_leak.max((w.dot(ne).abs() / w.norm()).f64());
        }
        let n_f = d.mul_vec(f).norm();
        let det_g = plane_det(&d, g1, f).abs();
        let det_e = plane_det(&d, e1, f).abs();
        rep.min_expanding_log_margin = rep.min_expanding_log_margin.min((det_g.ln() - n_f.ln()).f64());
        rep.min_contracting_log_margin = rep.min_contracting_log_margin.min((n_f.ln() - det_e.ln()).f64());
    }
    rep.pass = !points.is_empty()
        && rep.min_g_margin > 0.0
        && rep.min_e_margin > 0.0
        && rep.min_expanding_log_margin > 0.0
        && rep.min_contracting_log_margin > 0.0;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damap::LinearAnosov;
    use crate::hyperbolicity::cone_constants;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn k20_cones_invariant() {
        let m = DAMap::<f64>::for_k(20).unwrap();
        let c = cone_constants(&m.params).unwrap();
        let r = check_cone_invariance(&m, &c, 20_000, 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.perturbed_samples > 2_000);
        assert!(r.max_unstable_image_slope <= r.unstable_image_bound * (1.0 + 1e-12));
        assert!(r.max_stable_image_slope <= r.stable_image_bound * (1.0 + 1e-12));
    }

    #[test]
    fn off_support_margin_is_diagonal() {
        let m = DAMap::<f64>::for_k(20).unwrap();
        let c = cone_constants(&m.params).unwrap();
        let q = (0..1000)
            .map(|i| TorusPoint::new(0.001 * i as f64, 0.37, 0.81))
            .find(|q| m.jacobian_at(q).unwrap().c2 == 1.0)
            .unwrap();
        let r = check_cone_invariance_at(&m, &c, &[q]).unwrap();
        let s = &m.params.spectrum;
        let ratio = (s.lambda_c / s.lambda_u).powi(2);
        assert!(rel(r.min_unstable_margin, (1.0 - ratio) * c.ku) < 1e-12);
    }

    #[test]
    fn volume_margins_are_constant() {
        let m = DAMap::<f64>::for_k(20).unwrap();
        let r = check_volume_domination(&m, 5_000, 2).unwrap();
        assert!(r.pass);
        assert!(r.min_expanding_log_margin >= r.expected_log_margins[0] - 1e-9);
        assert!(r.min_contracting_log_margin >= r.expected_log_margins[1] - 1e-9);
    }

    #[test]
    fn generic_route_agrees_with_specific() {
        let m = DAMap::<f64>::for_k(20).unwrap();
        let c = cone_constants(&m.params).unwrap();
        let pts = sample_points(&m, 5_000, 4);
        let spec = check_cone_invariance_at(&m, &c, &pts).unwrap();
        let vol = check_volume_domination_at(&m, &pts).unwrap();
        let gen = splitting_at(&m, &DominatedSplitting::from_cones(&c), &pts).unwrap();
        assert!(gen.pass);
        assert!(rel(gen.min_g_margin, spec.min_unstable_margin) < 1e-9);
        assert!(rel(gen.min_e_margin, spec.min_stable_margin) < 1e-9);
        assert!((gen.min_expanding_log_margin - vol.min_expanding_log_margin).abs() < 1e-12);
        assert!((gen.min_contracting_log_margin - vol.min_contracting_log_margin).abs() < 1e-12);
        assert!(gen.max_plane_leak < 1e-15);
    }

    #[test]
    fn shrunken_cones_fail() {
        let m = DAMap::<f64>::for_k(20).unwrap();
        let c = cone_constants(&m.params).unwrap().scaled(1e-3);
        let pts = sample_points(&m, 2_000, 5);
        let gen = splitting_at(&m, &DominatedSplitting::from_cones(&c), &pts).unwrap();
        assert!(!gen.pass);
        assert!(gen.min_g_margin < 0.0);
        // Direct slope at the worst point exceeds the shrunken width.
        let spec = check_cone_invariance_at(&m, &c, &pts).unwrap();
        assert!(spec.max_unstable_image_slope > c.ku);
    }

    #[test]
    fn linear_map_passes_any_cones() {
        let m = LinearAnosov::<f64>::new(9).unwrap();
        for w in [1e-3, 1.0, 1e3] {
            let split = DominatedSplitting {
                e_normal: Vec3::unit(0),
                g_normal: Vec3::unit(2),
                k_e: w,
                k_g: w,
            };
            assert!(generic_dominated_splitting_check(&m, &split, 200, 1).unwrap().pass);
        }
    }

    #[test]
    fn parallel_planes_rejected() {
        let m = LinearAnosov::<f64>::new(9).unwrap();
        let split = DominatedSplitting {
            e_normal: Vec3::unit(2),
            g_normal: Vec3::new(0.0, 0.0, -2.0),
            k_e: 1.0,
            k_g: 1.0,
        };
        assert!(matches!(
            generic_dominated_splitting_check(&m, &split, 10, 1),
            Err(Error::InputGeometry(_))
        ));
    }
}
