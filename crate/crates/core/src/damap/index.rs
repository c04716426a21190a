//! Locating the integer translate of the tube that contains a torus point.
//!
//! The tube is the B-coordinate cylinder |y| ≤ a, x²+z² ≤ d² around
//! J = [−a, a]·e^c. Write D for the dominant axis of e^c and α_o = e_o/e_D for
//! the other two. A lift q+n close to J has n_o ≈ (q_D + n_D)α_o − q_o, so
//! the point frac(q_o − q_D α_o) must lie close to frac(n_D α) on the
//! 2-torus. The values frac(jα) are bucketed once; a query inspects a 3×3
//! block of buckets and confirms candidates in B-coordinates.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::perturbation::TubeParams;
use crate::scalar::Real;

/// Position of a lifted point inside the tube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeHit<S> {
    pub translate: [i64; 3],
    /// B-coordinates (x, y, z) of the lift q + n.
    pub local: Vec3<S>,
}

impl<S: Real> TubeHit<S> {
    pub fn radius(&self) -> S {
        self.local[0].hypot(self.local[2])
    }
}

#[derive(Clone, Debug)]
pub struct TubeIndex<S> {
    p_inv: Mat3<S>,
    a: S,
    d: S,
    dom: usize,
    others: [usize; 2],
    alpha: [S; 2],
    j_min: i64,
    j_max: i64,
    /// Search radius on the 2-torus.
    radius: S,
    g: usize,
    buckets: Vec<Vec<i64>>,
    frac: Vec<[S; 2]>,
}

fn frac<S: Real>(x: S) -> S {
    crate::damap::torus::reduce(x)
}

impl<S: Real> TubeIndex<S> {
    pub fn new(e_u: Vec3<S>, e_c: Vec3<S>, e_s: Vec3<S>, p_inv: Mat3<S>, tube: &TubeParams<S>) -> Self {
        let (a, d) = (tube.a, tube.d);
        let dom = (0..3)
            .max_by(|&i, &j| e_c[i].abs().partial_cmp(&e_c[j].abs()).unwrap())
            .unwrap();
        let others = [(dom + 1) % 3, (dom + 2) % 3];
        let alpha = others.map(|o| e_c[o] / e_c[dom]);
        // Euclidean radius of the cross-section, then its image on the 2-torus.
        let r_e = d * (S::one() + e_u.dot(e_s).abs()).sqrt();
        let stretch = (S::lit(2.0) + alpha[0] * alpha[0] + alpha[1] * alpha[1]).sqrt();
        let radius = r_e * stretch * S::lit(1.0 + 1e-9) + S::lit(1e-12);
        let reach = a * e_c[dom].abs() + r_e;
        let j_min = (-reach).floor().to_i64().unwrap_or(0) - 1;
        let j_max = reach.ceil().to_i64().unwrap_or(0);
        let count = (j_max - j_min + 1) as usize;
        let by_radius = (radius.recip().floor().to_usize().unwrap_or(1)).max(1);
        let by_count = ((count as f64).sqrt().ceil() as usize).max(1);
        let g = by_radius.min(by_count).clamp(1, 2048);
        let mut buckets = vec![Vec::new(); g * g];
        let mut fr = Vec::with_capacity(count);
        let gs = S::int(g as i64);
        for j in j_min..=j_max {
            let f = alpha.map(|al| frac(S::int(j) * al));
            let cell = |x: S| (x * gs).floor().to_usize().unwrap_or(0).min(g - 1);
            buckets[cell(f[0]) * g + cell(f[1])].push(j);
            fr.push(f);
        }
        TubeIndex {
            p_inv,
            a,
            d,
            dom,
            others,
            alpha,
            j_min,
            j_max,
            radius,
            g,
            buckets,
            frac: fr,
        }
    }

    fn check(&self, q: Vec3<S>, j: i64) -> Option<TubeHit<S>> {
        let s = q[self.dom] + S::int(j);
        let mut n = [0i64; 3];
        n[self.dom] = j;
        for (k, &o) in self.others.iter().enumerate() {
            n[o] = (s * self.alpha[k] - q[o]).round().to_i64()?;
        }
        let lift = q + Vec3::new(S::int(n[0]), S::int(n[1]), S::int(n[2]));
        let local = self.p_inv.mul_vec(lift);
        if local[1].abs() <= self.a && local[0].hypot(local[2]) <= self.d {
            Some(TubeHit {
                translate: n,
                local,
            })
        } else {
            None
        }
    }

    fn record(hit: Option<TubeHit<S>>, found: &mut Option<TubeHit<S>>) -> Result<()> {
        if let Some(h) = hit {
            match found {
                Some(prev) if prev.translate != h.translate => {
                    return Err(Error::Geometry(format!(
                        "point lies in two tube translates {:?} and {:?}",
                        prev.translate, h.translate
                    )))
                }
                _ => *found = Some(h),
            }
        }
        Ok(())
    }

    /// The unique translate whose tube contains q ∈ [0,1)³, if any.
    pub fn locate(&self, q: Vec3<S>) -> Result<Option<TubeHit<S>>> {
        let target = [0, 1].map(|k| frac(q[self.others[k]] - q[self.dom] * self.alpha[k]));
        let mut found = None;
        if self.g < 3 {
            for j in self.j_min..=self.j_max {
                Self::record(self.check(q, j), &mut found)?;
            }
            return Ok(found);
        }
        let gs = S::int(self.g as i64);
        let g = self.g as i64;
        let c = target.map(|t| (t * gs).floor().to_i64().unwrap_or(0).min(g - 1));
        for dx in -1..=1 {
            for dy in -1..=1 {
                let bx = (c[0] + dx).rem_euclid(g) as usize;
                let by = (c[1] + dy).rem_euclid(g) as usize;
                for &j in &self.buckets[bx * self.g + by] {
                    let f = self.frac[(j - self.j_min) as usize];
                    let dist = crate::damap::torus::min_image(f[0] - target[0])
                        .hypot(crate::damap::torus::min_image(f[1] - target[1]));
                    if dist <= self.radius {
                        Self::record(self.check(q, j), &mut found)?;
                    }
                }
            }
        }
        Ok(found)
    }

    /// Reference search over every translate with |n|∞ ≤ ceil(a·|e^c|∞)+1.
    pub fn locate_exhaustive(&self, q: Vec3<S>, e_c: Vec3<S>) -> Result<Option<TubeHit<S>>> {
        let w = (self.a * e_c.norm_inf()).ceil().to_i64().unwrap_or(0) + 1;
        let mut found = None;
        for x in -w..=w {
            for y in -w..=w {
                for z in -w..=w {
                    let lift = q + Vec3::new(S::int(x), S::int(y), S::int(z));
                    let local = self.p_inv.mul_vec(lift);
                    if local[1].abs() <= self.a && local[0].hypot(local[2]) <= self.d {
                        Self::record(
                            Some(TubeHit {
                                translate: [x, y, z],
                                local,
                            }),
                            &mut found,
                        )?;
                    }
                }
            }
        }
        Ok(found)
    }

    /// Number of dominant-axis slices indexed.
    pub fn slices(&self) -> usize {
        self.frac.len()
    }
}
