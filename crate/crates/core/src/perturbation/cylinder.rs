use super::bump::BumpProfile;
use super::center::CenterProfile;
use super::mollifier::{MollifierTable, DEFAULT_NODES};
use super::TubeParams;
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Ψ(x, y, z) = (x, y + ρ_d(r)φ(y), z) on the solid cylinder |y| ≤ a, x²+z² ≤ d²,
/// in B-coordinates.
#[derive(Clone, Debug)]
pub struct CylinderMap<S> {
    pub params: TubeParams<S>,
    pub bump: BumpProfile<S>,
    pub center: CenterProfile<S>,
}

/// Nontrivial Jacobian entries of Ψ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobian<S> {
    pub c1: S,
    pub c2: S,
    pub c3: S,
    /// C2 − (1+c) without cancellation; zero exactly on the equality locus.
    pub c2_excess: S,
}

impl<S: Real> Jacobian<S> {
    /// Values off the support.
    pub fn identity(c: S) -> Self {
        Jacobian {
            c1: S::zero(),
            c2: S::one(),
            c3: S::zero(),
            c2_excess: -c,
        }
    }
}

/// Relative step tolerance of the scalar inversion.
pub const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 100;

impl<S: Real> CylinderMap<S> {
    pub fn new(params: TubeParams<S>) -> Result<Self> {
        Self::with_nodes(params, DEFAULT_NODES)
    }

    pub fn with_nodes(params: TubeParams<S>, nodes: usize) -> Result<Self> {
        params.validate()?;
        let table = Arc::new(MollifierTable::new(nodes));
        let bump = BumpProfile::new(params.d)?;
        let center = CenterProfile::new(params.a, params.b, params.c, params.eps, table)?;
        Ok(CylinderMap {
            params,
            bump,
            center,
        })
    }

    pub fn radius(p: Vec3<S>) -> S {
        p[0].hypot(p[2])
    }

    pub fn contains(&self, p: Vec3<S>) -> bool {
        p[1].abs() <= self.params.a && Self::radius(p) <= self.params.d
    }

    fn check(&self, p: Vec3<S>) -> Result<S> {
        let r = Self::radius(p);
        if p[1].abs() <= self.params.a && r <= self.params.d {
            Ok(r)
        } else {
            Err(Error::Domain(format!(
                "point {:?} outside the cylinder (a={}, d={})",
                p.to_f64(),
                self.params.a.f64(),
                self.params.d.f64()
            )))
        }
    }

    pub fn eval_psi(&self, p: Vec3<S>) -> Result<Vec3<S>> {
        let r = self.check(p)?;
        let (rho, _) = self.bump.eval_unchecked(r);
        let phi = self.center.eval_unchecked(p[1]);
        Ok(Vec3::new(p[0], p[1] + rho * phi.value, p[2]))
    }

    /// Inverse of Ψ and the number of scalar iterations used.
    pub fn eval_psi_inverse(&self, q: Vec3<S>) -> Result<(Vec3<S>, usize)> {
        let r = self.check(q)?;
        let (rho, _) = self.bump.eval_unchecked(r);
        let (y, iters) = self.solve_y(rho, q[1])?;
        Ok((Vec3::new(q[0], y, q[2]), iters))
    }

    /// Solves y + ρφ(y) = target for y by safeguarded Newton iteration.
    pub fn solve_y(&self, rho: S, target: S) -> Result<(S, usize)> {
        let a = self.params.a;
        if !(target.abs() <= a) {
            return Err(Error::Domain(format!("y-target {} outside [−a, a]", target.f64())));
        }
        if rho == S::zero() {
            return Ok((target, 0));
        }
        let tol = S::lit(INVERSE_TOL);
        let (mut lo, mut hi) = (-a, a);
        let mut y = target;
        for iter in 1..=INVERSE_MAX_ITER {
            let phi = self.center.eval_unchecked(y);
            let f = y + rho * phi.value - target;
            if f == S::zero() {
                return Ok((y, iter));
            }
            if f < S::zero() {
                lo = y;
            } else {
                hi = y;
            }
            let slope = S::one() + rho * phi.slope;
            let mut next = y - f / slope;
            if !(next > lo && next < hi) {
                next = (lo + hi) / S::lit(2.0);
            }
            let done = (next - y).abs() <= tol;
            y = next;
            if done || hi - lo <= S::epsilon() * a {
                return Ok((y, iter));
            }
        }
        Err(Error::Precision(format!(
            "scalar inversion did not converge for target {}",
            target.f64()
        )))
    }

    pub fn jacobian_psi(&self, p: Vec3<S>) -> Result<Jacobian<S>> {
        let r = self.check(p)?;
        Ok(self.jacobian_at(p, r))
    }

    pub(crate) fn jacobian_at(&self, p: Vec3<S>, r: S) -> Jacobian<S> {
        let (rho, drho) = self.bump.eval_unchecked(r);
        let phi = self.center.eval_unchecked(p[1]);
        let (c1, c3) = if r == S::zero() {
            (S::zero(), S::zero())
        } else {
            let w = phi.value * drho / r;
            (w * p[0], w * p[2])
        };
        let c2 = S::one() + rho * phi.slope;
        let c2_excess = rho * phi.excess - self.params.c * self.bump.one_minus(r);
        Jacobian {
            c1,
            c2,
            c3,
            c2_excess,
        }
    }

    /// Ψ and its Jacobian at a point already known to be inside.
    pub(crate) fn eval_with_jacobian(&self, p: Vec3<S>) -> (Vec3<S>, Jacobian<S>) {
        let r = Self::radius(p);
        let (rho, drho) = self.bump.eval_unchecked(r);
        let phi = self.center.eval_unchecked(p[1]);
        let (c1, c3) = if r == S::zero() {
            (S::zero(), S::zero())
        } else {
            let w = phi.value * drho / r;
            (w * p[0], w * p[2])
        };
        let jac = Jacobian {
            c1,
            c2: S::one() + rho * phi.slope,
            c3,
            c2_excess: rho * phi.excess - self.params.c * self.bump.one_minus(r),
        };
        (Vec3::new(p[0], p[1] + rho * phi.value, p[2]), jac)
    }
}

/// Sampled check of the five properties of Ψ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeLemmaReport {
    pub interior_samples: usize,
    pub boundary_samples: usize,
    pub axis_samples: usize,
    pub max_boundary_displacement: f64,
    pub max_boundary_jacobian_deviation: f64,
    pub max_xz_change: f64,
    pub max_image_outside: f64,
    pub max_roundtrip_error: f64,
    pub max_inverse_iterations: usize,
    pub max_plane_residual: f64,
    pub min_c2: f64,
    pub max_c2: f64,
    pub max_abs_c1: f64,
    pub max_abs_c3: f64,
    pub min_c2_excess: f64,
    pub c2_lower_bound: f64,
    pub c2_upper_bound: f64,
    pub shear_bound: f64,
    /// Equality det = 1+c seen at r ≤ 1e−6, |y| ≤ b.
    pub equality_on_locus: usize,
    /// Equality seen within the underflow band just outside |y| = b.
    pub equality_in_resolution_band: usize,
    pub equality_off_locus: usize,
    pub equality_missed_on_axis: usize,
    /// Worst margins for: diffeomorphism along y-lines, identity on the
    /// boundary, invariant planes, determinant bound with its equality case,
    /// and the C1/C2/C3 bounds. Each violation count contributes −1.
    pub margins: [f64; 5],
    pub pass: bool,
}

/// Tolerance below which a margin counts as violated.
pub const MARGIN_TOL: f64 = 1e-9;

pub fn verify_tube_lemma<S: Real>(map: &CylinderMap<S>, n_samples: usize, seed: u64) -> TubeLemmaReport {
    let n = n_samples.max(1);
    let n_boundary = (n / 10).max(2);
    let n_axis = (n / 100).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let TubeParams { a, b, c, d, eps } = map.params;
    let (af, bf, df) = (a.f64(), b.f64(), d.f64());
    let band = eps.f64() * 1e-3;

    let mut rep = TubeLemmaReport {
        interior_samples: n,
        boundary_samples: n_boundary,
        axis_samples: n_axis,
        max_boundary_displacement: 0.0,
        max_boundary_jacobian_deviation: 0.0,
        max_xz_change: 0.0,
        max_image_outside: 0.0,
        max_roundtrip_error: 0.0,
        max_inverse_iterations: 0,
        max_plane_residual: 0.0,
        min_c2: f64::INFINITY,
        max_c2: f64::NEG_INFINITY,
        max_abs_c1: 0.0,
        max_abs_c3: 0.0,
        min_c2_excess: f64::INFINITY,
        c2_lower_bound: (S::one() + c).f64(),
        c2_upper_bound: map.params.c2_upper().f64(),
        shear_bound: map.params.shear_bound().f64(),
        equality_on_locus: 0,
        equality_in_resolution_band: 0,
        equality_off_locus: 0,
        equality_missed_on_axis: 0,
        margins: [0.0; 5],
        pass: false,
    };

    let inside = |x: f64, y: f64, z: f64| {
        let mut p = Vec3::new(S::lit(x), S::lit(y), S::lit(z));
        let mut guard = 0;
        while CylinderMap::radius(p) > d && guard < 8 {
            p = Vec3::new(p[0] * S::lit(1.0 - 1e-15), p[1], p[2] * S::lit(1.0 - 1e-15));
            guard += 1;
        }
        p
    };

    let mut points: Vec<(Vec3<S>, u8)> = Vec::with_capacity(n + n_boundary + n_axis);
    for _ in 0..n {
        let y = rng.gen_range(-af..=af);
        let r = df * rng.gen::<f64>().sqrt();
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        points.push((inside(r * t.cos(), y, r * t.sin()), 0));
    }
    for i in 0..n_boundary {
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        let p = if i % 2 == 0 {
            inside(df * t.cos(), rng.gen_range(-af..=af), df * t.sin())
        } else {
            let r = df * rng.gen::<f64>().sqrt();
            let y = if rng.gen::<bool>() { af } else { -af };
            inside(r * t.cos(), y, r * t.sin())
        };
        points.push((p, 1));
    }
    for _ in 0..n_axis {
        let y = rng.gen_range(-af..=af);
        points.push((Vec3::new(S::zero(), S::lit(y), S::zero()), 2));
    }

    for (p, kind) in points {
        let (q, jac) = map.eval_with_jacobian(p);
        let r = CylinderMap::radius(p).f64();
        let y = p[1].f64();
        let xz = (q[0] - p[0]).abs().f64() + (q[2] - p[2]).abs().f64();
        rep.max_xz_change = rep.max_xz_change.max(xz);
        rep.max_image_outside = rep.max_image_outside.max(q[1].abs().f64() - af).max(0.0);
        match map.eval_psi_inverse(q) {
            Ok((back, iters)) => {
                rep.max_roundtrip_error = rep.max_roundtrip_error.max((back - p).norm().f64());
                rep.max_inverse_iterations = rep.max_inverse_iterations.max(iters);
            }
            Err(_) => rep.max_roundtrip_error = f64::INFINITY,
        }
        let (c1, c2, c3) = (jac.c1.f64(), jac.c2.f64(), jac.c3.f64());
        rep.min_c2 = rep.min_c2.min(c2);
        rep.max_c2 = rep.max_c2.max(c2);
        rep.max_abs_c1 = rep.max_abs_c1.max(c1.abs());
        rep.max_abs_c3 = rep.max_abs_c3.max(c3.abs());
        rep.min_c2_excess = rep.min_c2_excess.min(jac.c2_excess.f64());

        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let (al, ga) = (theta.cos(), theta.sin());
        let image = [al, c1 * al + c3 * ga, ga];
        let normal = [ga, 0.0, -al];
        let res = image[0] * normal[0] + image[1] * normal[1] + image[2] * normal[2];
        rep.max_plane_residual = rep.max_plane_residual.max(res.abs());

        if kind == 1 {
            rep.max_boundary_displacement =
                rep.max_boundary_displacement.max((q - p).norm().f64());
            let dev = c1.abs().max(c3.abs()).max((c2 - 1.0).abs());
            rep.max_boundary_jacobian_deviation = rep.max_boundary_jacobian_deviation.max(dev);
        }
        let on_locus = r <= 1e-6 && y.abs() <= bf;
        if jac.c2_excess == S::zero() {
            if on_locus {
                rep.equality_on_locus += 1;
            } else if r <= 1e-6 && y.abs() <= bf + band {
                rep.equality_in_resolution_band += 1;
            } else {
                rep.equality_off_locus += 1;
            }
        } else if kind == 2 && y.abs() <= bf {
            rep.equality_missed_on_axis += 1;
        }
    }

    let m1 = -(rep.max_xz_change.max(rep.max_image_outside).max(rep.max_roundtrip_error))
        .max(0.0)
        .min(if rep.min_c2 > 0.0 { 0.0 } else { -1.0 });
    let m2 = -rep.max_boundary_displacement.max(rep.max_boundary_jacobian_deviation);
    let m3 = -rep.max_plane_residual;
    let m4 = rep
        .min_c2_excess
        .min(-((rep.equality_off_locus + rep.equality_missed_on_axis) as f64));
    let m5 = (rep.c2_upper_bound - rep.max_c2)
        .min(rep.shear_bound - rep.max_abs_c1.max(rep.max_abs_c3))
        .min(rep.min_c2 - rep.c2_lower_bound);
    rep.margins = [m1, m2, m3, m4, m5];
    rep.pass = rep.margins.iter().all(|m| *m >= -MARGIN_TOL);
    rep
}
