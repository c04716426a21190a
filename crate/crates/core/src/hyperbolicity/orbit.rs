use crate::damap::{TorusMap, TorusPoint};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::{Real, Wide};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Steps between renormalisations of the growth vector.
const RENORM_EVERY: usize = 32;

/// Seeded starting point of orbit `i`, independent of any other orbit.
pub fn orbit_start<S: Real>(seed: u64, i: u64) -> TorusPoint<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    TorusPoint::new(S::lit(rng.gen()), S::lit(rng.gen()), S::lit(rng.gen()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub lam_u: f64,
    pub lam_c: f64,
    pub lam_s: f64,
    /// Birkhoff average of log|det Tf|.
    pub mean_log_det: f64,
}

/// Birkhoff sums along one orbit segment, in B-coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitStats {
    pub start: [f64; 3],
    pub n: usize,
    pub burn_in: usize,
    /// Σ log|det Tf|_XY|.
    pub sum_log_det_cu: f64,
    /// Σ log‖Tf|_F‖ with F the y-axis.
    pub sum_log_center: f64,
    /// Σ log‖Tf⁻¹|_{E^cu}‖ in the metric making E^u ⊥ F.
    pub sum_log_inv_cu: f64,
    pub sum_log_det: f64,
    pub exponents: Exponents,
    /// Term j is log‖Tf⁻¹|E^cu(f^j x)‖, j = 1..=n.
    #[serde(skip)]
    pub lognorms: Vec<f64>,
}

impl OrbitStats {
    pub fn mean_log_det_cu(&self) -> f64 {
        self.sum_log_det_cu / self.n as f64
    }

    pub fn mean_log_center(&self) -> f64 {
        self.sum_log_center / self.n as f64
    }
}

/// log‖Tf⁻¹|E^cu‖ after the step with derivative `d`: E^cu = XY carries the
/// rates |d₀₀| on E^u and |d₁₁| on F.
fn inverse_cu_lognorm<S: Real>(d: &Mat3<S>) -> S {
    -(d.0[0][0].abs().min(d.0[1][1].abs())).ln()
}

/// Runs `burn_in` unrecorded steps, then `n` recorded ones.
pub fn orbit_stats<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    x0: &TorusPoint<S>,
    n: usize,
    burn_in: usize,
    keep_lognorms: bool,
) -> Result<OrbitStats> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("orbit length must be positive".into()));
    }
    let mut p = *x0;
    for _ in 0..burn_in {
        p = map.forward(&p)?;
    }
    let start = p.coords().to_f64();
    let (mut s_cu, mut s_c, mut s_inv, mut s_det, mut s_u) =
        (Wide::lit(0.0), Wide::lit(0.0), Wide::lit(0.0), Wide::lit(0.0), Wide::lit(0.0));
    let mut lognorms = Vec::with_capacity(if keep_lognorms { n } else { 0 });
    let mut w = Vec3::new(S::one(), S::zero(), S::zero());
    for i in 0..n {
        let (q, d) = map.step(&p)?;
        let m = &d.0;
        let det_cu = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
        s_cu += Wide::lit(det_cu.ln().f64());
        s_c += Wide::lit(m[1][1].abs().ln().f64());
        let l = inverse_cu_lognorm(&d).f64();
        s_inv += Wide::lit(l);
        s_det += Wide::lit(d.det().abs().ln().f64());
        if keep_lognorms {
            lognorms.push(l);
        }
        w = d.mul_vec(w);
        if (i + 1) % RENORM_EVERY == 0 || i + 1 == n {
            let r = w.norm();
            if !(r.is_finite() && r > S::min_positive_value()) {
                return Err(Error::Precision(format!(
                    "growth vector norm {} at step {}",
                    r.f64(),
                    i + 1
                )));
            }
            s_u += Wide::lit(r.ln().f64());
            w = w.scale(r.recip());
        }
        p = q;
    }
    let nf = n as f64;
    let lam_u = s_u.hi() / nf;
    let lam_c = s_c.hi() / nf;
    let mean_log_det = s_det.hi() / nf;
    Ok(OrbitStats {
        start,
        n,
        burn_in,
        sum_log_det_cu: s_cu.hi(),
        sum_log_center: s_c.hi(),
        sum_log_inv_cu: s_inv.hi(),
        sum_log_det: s_det.hi(),
        exponents: Exponents {
            lam_u,
            lam_c,
            lam_s: mean_log_det - lam_u - lam_c,
            mean_log_det,
        },
        lognorms,
    })
}

pub fn lyapunov_exponents<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    x0: &TorusPoint<S>,
    n: usize,
) -> Result<Exponents> {
    if n < 1000 {
        return Err(Error::ParameterOutOfRange(format!("orbit length {n} < 1000")));
    }
    Ok(orbit_stats(map, x0, n, 0, false)?.exponents)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub start: [f64; 3],
    pub exponents: Exponents,
    /// avg log det_cu − log λ_u(f), λ_u(f) the constant (1,1) entry.
    pub cu_margin: f64,
    /// avg log‖Tf|_F‖.
    pub center_margin: f64,
    pub mean_log_inv_cu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffReport {
    pub orbits: usize,
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub log_unstable_factor: f64,
    pub per_orbit: Vec<OrbitSummary>,
    pub min_cu_margin: f64,
    pub min_center_margin: f64,
    /// Half the smaller of the two minima; an empirical stand-in for the
    /// uniformity constant a.
    pub a_emp: f64,
    pub pass: bool,
}

/// Orbits run in parallel; results are gathered in orbit order and reduced
/// sequentially, so the report does not depend on the worker count.
pub fn birkhoff_check<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    orbits: usize,
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Result<BirkhoffReport> {
    if orbits == 0 {
        return Err(Error::ParameterOutOfRange("need at least one orbit".into()));
    }
    let log_lu = map.unstable_factor().ln().f64();
    let stats: Vec<Result<OrbitStats>> = (0..orbits as u64)
        .into_par_iter()
        .map(|i| orbit_stats(map, &orbit_start(seed, i), n, burn_in, false))
        .collect();
    let mut per_orbit = Vec::with_capacity(orbits);
    for s in stats {
        let s = s?;
        per_orbit.push(OrbitSummary {
            start: s.start,
            exponents: s.exponents,
            cu_margin: s.mean_log_det_cu() - log_lu,
            center_margin: s.mean_log_center(),
            mean_log_inv_cu: s.sum_log_inv_cu / s.n as f64,
        });
    }
    let min_cu = per_orbit.iter().map(|o| o.cu_margin).fold(f64::INFINITY, f64::min);
    let min_c = per_orbit.iter().map(|o| o.center_margin).fold(f64::INFINITY, f64::min);
    Ok(BirkhoffReport {
        orbits,
        n,
        burn_in,
        seed,
        log_unstable_factor: log_lu,
        per_orbit,
        min_cu_margin: min_cu,
        min_center_margin: min_c,
        a_emp: 0.5 * min_cu.min(min_c),
        pass: min_cu > 0.0 && min_c > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damap::{DAMap, LinearAnosov};

    #[test]
    fn linear_exponents_are_eigenvalues() {
        let m = LinearAnosov::<f64>::new(11).unwrap();
        let e = lyapunov_exponents(&m, &orbit_start(1, 0), 10_000).unwrap();
        let s = &m.spectrum;
        assert!((e.lam_u - s.lambda_u.ln()).abs() < 1e-6);
        assert!((e.lam_c - s.lambda_c.ln()).abs() < 1e-12);
        assert!((e.lam_s - s.lambda_s.ln()).abs() < 1e-6);
    }

    #[test]
    fn short_orbits_rejected() {
        let m = LinearAnosov::<f64>::new(11).unwrap();
        assert!(lyapunov_exponents(&m, &orbit_start(1, 0), 999).is_err());
    }

    #[test]
    fn da_exponents_and_sum_identity() {
        let m = DAMap::<f64>::for_k(20).unwrap();
        let x0 = orbit_start(7, 3);
        let st = orbit_stats(&m, &x0, 50_000, 100, true).unwrap();
        let e = st.exponents;
        let lu2 = 2.0 * m.params.spectrum.lambda_u.ln();
        assert!((e.lam_u - lu2).abs() < 1e-3);
        assert!(e.lam_c > 0.0);
        // det Tf_k = C2 since λsλcλu = 1; recompute along the same orbit.
        let mut p = x0;
        for _ in 0..100 {
            p = m.eval_f(&p).unwrap();
        }
        let mut sum = 0.0;
        for _ in 0..50_000 {
            let (q, j) = m.step_with_jacobian(&p).unwrap();
            sum += j.c2.ln();
            p = q;
        }
        assert!((e.lam_u + e.lam_c + e.lam_s - sum / 50_000.0).abs() < 1e-8);
        assert_eq!(st.lognorms.len(), 50_000);
        assert!((st.lognorms.iter().sum::<f64>() - st.sum_log_inv_cu).abs() < 1e-6);
    }

    #[test]
    fn birkhoff_is_thread_independent() {
        let m = DAMap::<f64>::for_k(12).unwrap();
        let run = |t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
                .install(|| birkhoff_check(&m, 4, 5_000, 10, 3).unwrap())
        };
        let (a, b) = (run(1), run(3));
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.pass);
        assert!(a.a_emp > 0.0);
    }
}
