use super::index::{TubeHit, TubeIndex};
use super::torus::{LiftPoint, TorusPoint};
use super::DAParams;
use crate::anosov::{inverse_matrix_for_k, matrix_for_k, IntMatrix3};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::perturbation::{CylinderMap, Jacobian};
use crate::scalar::Real;

/// Relative tolerance of the B-set test det_cu ≤ (λu)².
pub const B_SET_TOL: f64 = 1e-12;

/// Center segment t·e^c, t ∈ [−half, half], as a pair of lifted endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<S> {
    pub half_length: S,
    pub start: LiftPoint<S>,
    pub end: LiftPoint<S>,
}

impl<S: Real> Segment<S> {
    fn along(e_c: Vec3<S>, half: S) -> Self {
        Segment {
            half_length: half,
            start: LiftPoint(e_c * (-half)),
            end: LiftPoint(e_c * half),
        }
    }

    pub fn contains(&self, other: &Segment<S>) -> bool {
        other.half_length <= self.half_length
    }
}

/// Evaluatable f_k with its tube lookup.
#[derive(Clone, Debug)]
pub struct DAMap<S> {
    pub params: DAParams<S>,
    pub cylinder: CylinderMap<S>,
    index: TubeIndex<S>,
    a: IntMatrix3,
    a_inv: IntMatrix3,
    /// I_k = [−b, b]·e^c.
    pub segment_i: Segment<S>,
    /// J_k = [−a, a]·e^c.
    pub segment_j: Segment<S>,
    /// Translate window of the exhaustive search.
    pub window: i64,
}

impl<S: Real> DAMap<S> {
    pub fn new(params: DAParams<S>) -> Result<Self> {
        if !params.certificate.pass {
            return Err(Error::Geometry(format!(
                "lattice certificate failed for k={}",
                params.k
            )));
        }
        let cylinder = CylinderMap::new(params.tube)?;
        let f = &params.frame;
        let index = TubeIndex::new(f.e_u, f.e_c, f.e_s, f.p_inv, &params.tube);
        let window = (params.tube.a * f.e_c.norm_inf()).ceil().to_i64().unwrap_or(0) + 1;
        Ok(DAMap {
            a: matrix_for_k(params.k)?,
            a_inv: inverse_matrix_for_k(params.k)?,
            segment_i: Segment::along(f.e_c, params.tube.b),
            segment_j: Segment::along(f.e_c, params.tube.a),
            cylinder,
            index,
            window,
            params,
        })
    }

    pub fn for_k(k: u32) -> Result<Self> {
        Self::new(super::default_params(k)?)
    }

    pub fn k(&self) -> u32 {
        self.params.k
    }

    pub fn index(&self) -> &TubeIndex<S> {
        &self.index
    }

    fn apply(&self, m: &IntMatrix3, p: Vec3<S>) -> Vec3<S> {
        TorusPoint::project(m.mul_vec(p)).coords()
    }

    /// A_k p on the torus.
    pub fn apply_a(&self, p: &TorusPoint<S>) -> TorusPoint<S> {
        TorusPoint::project(self.a.mul_vec(p.coords()))
    }

    /// Tube coordinates of p if p lies in a translate of the tube.
    pub fn in_tube(&self, p: &TorusPoint<S>) -> Result<Option<TubeHit<S>>> {
        self.index.locate(p.coords())
    }

    /// Reference lookup over the full translate window.
    pub fn in_tube_exhaustive(&self, p: &TorusPoint<S>) -> Result<Option<TubeHit<S>>> {
        self.index.locate_exhaustive(p.coords(), self.params.frame.e_c)
    }

    /// ψ_k on the torus.
    pub fn psi(&self, q: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        Ok(self.psi_with_jacobian(q)?.0)
    }

    fn psi_with_jacobian(&self, q: &TorusPoint<S>) -> Result<(TorusPoint<S>, Jacobian<S>)> {
        match self.in_tube(q)? {
            None => Ok((*q, Jacobian::identity(self.params.tube.c))),
            Some(hit) => {
                let (img, jac) = self.cylinder.eval_with_jacobian(hit.local);
                let shift = self.params.frame.e_c * (img[1] - hit.local[1]);
                Ok((TorusPoint::project(q.coords() + shift), jac))
            }
        }
    }

    pub fn psi_inverse(&self, q: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        match self.in_tube(q)? {
            None => Ok(*q),
            Some(hit) => {
                let (pre, _) = self.cylinder.eval_psi_inverse(hit.local)?;
                let shift = self.params.frame.e_c * (pre[1] - hit.local[1]);
                Ok(TorusPoint::project(q.coords() + shift))
            }
        }
    }

    pub fn eval_f(&self, p: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        let q = TorusPoint::project(self.a.mul_vec(p.coords()));
        let r = self.psi(&q)?;
        Ok(TorusPoint::project(self.apply(&self.a, r.coords())))
    }

    pub fn eval_f_inverse(&self, p: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        let q = TorusPoint::project(self.a_inv.mul_vec(p.coords()));
        let r = self.psi_inverse(&q)?;
        Ok(TorusPoint::project(self.apply(&self.a_inv, r.coords())))
    }

    /// Jacobian entries C1, C2, C3 of ψ at A_k p.
    pub fn jacobian_at(&self, p: &TorusPoint<S>) -> Result<Jacobian<S>> {
        let q = TorusPoint::project(self.a.mul_vec(p.coords()));
        Ok(self.psi_with_jacobian(&q)?.1)
    }

    /// [Tf_k]_B from the Jacobian entries at A_k p.
    pub fn derivative_from(&self, j: &Jacobian<S>) -> Mat3<S> {
        let s = &self.params.spectrum;
        let (lu, lc, ls) = (s.lambda_u, s.lambda_c, s.lambda_s);
        let z = S::zero();
        Mat3([
            [lu * lu, z, z],
            [lc * lu * j.c1, lc * lc * j.c2, lc * ls * j.c3],
            [z, z, ls * ls],
        ])
    }

    pub fn eval_df(&self, p: &TorusPoint<S>) -> Result<Mat3<S>> {
        Ok(self.derivative_from(&self.jacobian_at(p)?))
    }

    /// f(p) together with the Jacobian entries used by Tf at p.
    pub fn step_with_jacobian(&self, p: &TorusPoint<S>) -> Result<(TorusPoint<S>, Jacobian<S>)> {
        let q = TorusPoint::project(self.a.mul_vec(p.coords()));
        let (r, jac) = self.psi_with_jacobian(&q)?;
        Ok((TorusPoint::project(self.apply(&self.a, r.coords())), jac))
    }

    /// det of Tf on the XY-plane: (λu λc)²·C2(A_k p).
    pub fn det_cu(&self, p: &TorusPoint<S>) -> Result<S> {
        let s = &self.params.spectrum;
        let j = self.jacobian_at(p)?;
        Ok((s.lambda_u * s.lambda_c).powi(2) * j.c2)
    }

    /// Membership in B(f) = {det_cu ≤ (λu)²}.
    pub fn b_set_member(&self, p: &TorusPoint<S>) -> Result<bool> {
        let lu2 = self.params.spectrum.lambda_u.powi(2);
        Ok(self.det_cu(p)? <= lu2 * S::lit(1.0 + B_SET_TOL))
    }

    /// The point p with A_k p at tube coordinates `local` (B-coordinates of
    /// the base translate), so that Tf at p sees Ψ at `local`.
    pub fn preimage_of_tube_point(&self, local: Vec3<S>) -> TorusPoint<S> {
        let lift = self.params.frame.p.mul_vec(local);
        TorusPoint::project(self.a_inv.mul_vec(TorusPoint::project(lift).coords()))
    }

    /// The segment A_k⁻¹(I_k) = [−b/λc, b/λc]·e^c where ‖Tf|E^c‖ = 1.
    pub fn equality_locus(&self) -> Segment<S> {
        Segment::along(
            self.params.frame.e_c,
            self.params.tube.b / self.params.spectrum.lambda_c,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn map20() -> DAMap<f64> {
        DAMap::for_k(20).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng) -> TorusPoint<f64> {
        TorusPoint::new(rng.gen(), rng.gen(), rng.gen())
    }

    #[test]
    fn origin_fixed() {
        let m = map20();
        assert_eq!(m.eval_f(&TorusPoint::origin()).unwrap(), TorusPoint::origin());
        let hit = m.in_tube(&TorusPoint::origin()).unwrap().unwrap();
        assert_eq!(hit.local, Vec3::zero());
    }

    #[test]
    fn identity_on_preimage_of_i() {
        let m = map20();
        let lc = m.params.spectrum.lambda_c;
        for t in [-0.9, -0.3, 0.2, 0.7, 1.0] {
            let t = t * m.params.tube.b / lc;
            let p = LiftPoint(m.params.frame.e_c * t).project();
            let fp = m.eval_f(&p).unwrap();
            assert!(p.distance(&fp) < 1e-11, "t={t}: {}", p.distance(&fp));
            let det = m.det_cu(&p).unwrap();
            let lu2 = m.params.spectrum.lambda_u.powi(2);
            assert!((det - lu2).abs() <= 1e-9 * lu2);
            assert!(m.b_set_member(&p).unwrap());
        }
    }

    #[test]
    fn outside_radius_not_in_tube() {
        let m = map20();
        let d = m.params.tube.d;
        let p = LiftPoint(m.params.frame.e_u * (d * 1.001)).project();
        assert!(m.in_tube(&p).unwrap().is_none());
        let p = LiftPoint(m.params.frame.e_u * (d * 0.999)).project();
        assert!(m.in_tube(&p).unwrap().is_some());
    }

    #[test]
    fn index_agrees_with_exhaustive_search() {
        let m = DAMap::<f64>::for_k(9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut hits = 0;
        for i in 0..4000 {
            // Half the points are pushed into the tube.
            let p = if i % 2 == 0 {
                random_point(&mut rng)
            } else {
                let f = &m.params.frame;
                let t = rng.gen_range(-1.0..1.0) * m.params.tube.a;
                let r = m.params.tube.d * rng.gen::<f64>().sqrt();
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                LiftPoint(f.e_c * t + f.e_u * (r * th.cos()) + f.e_s * (r * th.sin())).project()
            };
            let fast = m.in_tube(&p).unwrap();
            let slow = m.in_tube_exhaustive(&p).unwrap();
            assert_eq!(fast.map(|h| h.translate), slow.map(|h| h.translate));
            hits += fast.is_some() as usize;
        }
        assert!(hits > 1500);
    }

    #[test]
    fn inverse_round_trip() {
        let m = map20();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20_000 {
            let p = random_point(&mut rng);
            let q = m.eval_f_inverse(&m.eval_f(&p).unwrap()).unwrap();
            assert!(p.distance(&q) < 1e-10, "{:?}", p);
        }
    }

    #[test]
    fn derivative_structure() {
        let m = map20();
        let s = m.params.spectrum.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..2000 {
            let p = random_point(&mut rng);
            let df = m.eval_df(&p).unwrap();
            assert_eq!(df.0[0], [s.lambda_u * s.lambda_u, 0.0, 0.0]);
            assert_eq!(df.0[2], [0.0, 0.0, s.lambda_s * s.lambda_s]);
            let c2 = m.jacobian_at(&p).unwrap().c2;
            assert!((df.det() - c2).abs() <= 1e-9 * c2);
        }
    }

    #[test]
    fn off_support_is_linear() {
        let m = map20();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = m.params.spectrum.clone();
        let lu2 = s.lambda_u.powi(2);
        let mut seen = 0;
        while seen < 500 {
            let p = random_point(&mut rng);
            let q = TorusPoint::project(m.a.mul_vec(p.coords()));
            if m.in_tube(&q).unwrap().is_some() {
                continue;
            }
            seen += 1;
            let b2 = m.a.mul(&m.a);
            let lin = TorusPoint::project(b2.mul_vec(p.coords()));
            assert!(lin.distance(&m.eval_f(&p).unwrap()) < 1e-12);
            assert_eq!(m.eval_df(&p).unwrap(), Mat3::diag(lu2, s.lambda_c.powi(2), s.lambda_s.powi(2)));
            assert!(!m.b_set_member(&p).unwrap());
        }
    }
}
