//! Lattice geometry of the center segment J_k = [−a, a]·e^c: separation of
//! its integer translates, density of its projection, and the explicit
//! intersection sequences with the faces of the unit cube.

use super::field::{point_segment_distance, SegmentCloud};
use crate::anosov::{frame_for_k, EigenFrame, Spectrum};
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// ½·floor(1/(λc−1)).
pub fn a_tilde<S: Real>(lambda_c: S) -> S {
    (lambda_c - S::one()).recip().floor() / S::lit(2.0)
}

/// Smallest window that contains every translate meeting J_k.
pub fn required_window<S: Real>(e_c: Vec3<S>, a: S) -> i64 {
    (S::lit(2.0) * a * e_c.norm_inf()).ceil().to_i64().unwrap_or(i64::MAX) + 1
}

/// Closest translate found by a gap search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCertificate<S> {
    pub argmin: [i64; 3],
    pub distance: S,
    pub window: i64,
}

/// Puts n and −n on the same representative (first nonzero entry positive).
fn canonical(n: [i64; 3]) -> bool {
    match n.iter().find(|&&v| v != 0) {
        Some(&v) => v > 0,
        None => false,
    }
}

fn to_vec<S: Real>(n: [i64; 3]) -> Vec3<S> {
    Vec3::new(S::int(n[0]), S::int(n[1]), S::int(n[2]))
}

/// Minimum over n ≠ 0, |n|∞ ≤ W of d(J, J+n), computed as the distance from
/// n to the doubled segment J − J = [−2a, 2a]·e. Candidates are enumerated
/// slice by slice along the dominant axis of e.
pub fn lattice_min_gap<S: Real>(e: Vec3<S>, a: S, window: i64) -> GapCertificate<S> {
    let len = S::lit(2.0) * a;
    let dom = (0..3)
        .max_by(|&i, &j| e[i].abs().partial_cmp(&e[j].abs()).unwrap())
        .unwrap();
    let others = [(dom + 1) % 3, (dom + 2) % 3];
    let ed = e[dom];
    let p0 = e * (-len);
    let p1 = e * len;
    let mut best = GapCertificate {
        argmin: [0; 3],
        distance: S::infinity(),
        window,
    };
    let consider = |n: [i64; 3], best: &mut GapCertificate<S>| {
        if !canonical(n) || n.iter().any(|v| v.abs() > window) {
            return;
        }
        let d = point_segment_distance(to_vec(n), p0, p1);
        if d < best.distance {
            best.distance = d;
            best.argmin = n;
        }
    };
    let span = (len * ed.abs()).floor().to_i64().unwrap_or(0) + 1;
    // Coarse pass: three candidates per axis around the slice centre.
    for j in (-span).max(-window)..=span.min(window) {
        let s = (S::int(j) / ed).max(-len).min(len);
        let r: [i64; 2] = others.map(|o| (s * e[o]).round().to_i64().unwrap_or(0));
        for d0 in -1..=1 {
            for d1 in -1..=1 {
                let mut n = [0i64; 3];
                n[dom] = j;
                n[others[0]] = r[0] + d0;
                n[others[1]] = r[1] + d1;
                consider(n, &mut best);
            }
        }
    }
    // Exact pass: any n within the coarse bound lies in these boxes.
    let delta = best.distance;
    if !delta.is_finite() {
        return best;
    }
    let jmax = (len * ed.abs() + delta).floor().to_i64().unwrap_or(0);
    for j in (-jmax).max(-window)..=jmax.min(window) {
        let s_lo = ((S::int(j) - delta) / ed.abs()).max(-len);
        let s_hi = ((S::int(j) + delta) / ed.abs()).min(len);
        if s_lo > s_hi {
            continue;
        }
        let (s_lo, s_hi) = if ed < S::zero() { (-s_hi, -s_lo) } else { (s_lo, s_hi) };
        let range = |o: usize| {
            let (u, v) = (s_lo * e[o], s_hi * e[o]);
            let lo = (u.min(v) - delta).ceil().to_i64().unwrap_or(0);
            let hi = (u.max(v) + delta).floor().to_i64().unwrap_or(0);
            (lo, hi)
        };
        let (r0, r1) = (range(others[0]), range(others[1]));
        for n0 in r0.0..=r0.1 {
            for n1 in r1.0..=r1.1 {
                let mut n = [0i64; 3];
                n[dom] = j;
                n[others[0]] = n0;
                n[others[1]] = n1;
                consider(n, &mut best);
            }
        }
    }
    best
}

/// Closest points between segments [p1,q1] and [p2,q2] (Ericson's clamped
/// parametric solution).
pub fn segment_segment_distance<S: Real>(p1: Vec3<S>, q1: Vec3<S>, p2: Vec3<S>, q2: Vec3<S>) -> S {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let tiny = S::epsilon();
    let clamp = |x: S| x.max(S::zero()).min(S::one());
    let (s, t);
    if a <= tiny && e <= tiny {
        return r.norm();
    }
    if a <= tiny {
        s = S::zero();
        t = clamp(f / e);
    } else {
        let c = d1.dot(r);
        if e <= tiny {
            t = S::zero();
            s = clamp(-c / a);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > S::zero() {
                clamp((b * f - c * e) / denom)
            } else {
                S::zero()
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < S::zero() {
                t0 = S::zero();
                s0 = clamp(-c / a);
            } else if t0 > S::one() {
                t0 = S::one();
                s0 = clamp((b - c) / a);
            }
            s = s0;
            t = t0;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c1 - c2).norm()
}

/// O(W³) reference: every translate in the window, segment against segment.
pub fn lattice_min_gap_brute<S: Real>(e: Vec3<S>, a: S, window: i64) -> GapCertificate<S> {
    let p = e * (-a);
    let q = e * a;
    let mut best = GapCertificate {
        argmin: [0; 3],
        distance: S::infinity(),
        window,
    };
    for x in -window..=window {
        for y in -window..=window {
            for z in -window..=window {
                let n = [x, y, z];
                if !canonical(n) {
                    continue;
                }
                let t = to_vec(n);
                let d = segment_segment_distance(p, q, p + t, q + t);
                if d < best.distance {
                    best.distance = d;
                    best.argmin = n;
                }
            }
        }
    }
    best
}

/// The lattice part of the parameter certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCertificate {
    pub k: u32,
    pub gap: GapCertificate<f64>,
    pub two_d: f64,
    /// Euclidean diameter of the B-coordinate cross-section of radius d.
    pub cross_section_diameter: f64,
    pub pass: bool,
}

/// Checks that translates of the tube of radius d around J = [−a, a]·e^c
/// are pairwise disjoint.
pub fn certify_tube<S: Real>(k: u32, frame: &EigenFrame<S>, a: S, d: S) -> LatticeCertificate {
    let window = required_window(frame.e_c, a);
    let gap = lattice_min_gap(frame.e_c, a, window);
    let sigma = (S::one() + frame.e_u.dot(frame.e_s).abs()).sqrt();
    let diameter = S::lit(2.0) * d * sigma;
    LatticeCertificate {
        k,
        gap: GapCertificate {
            argmin: gap.argmin,
            distance: gap.distance.f64(),
            window,
        },
        two_d: (S::lit(2.0) * d).f64(),
        cross_section_diameter: diameter.f64(),
        pass: gap.distance > S::lit(2.0) * d && gap.distance > diameter,
    }
}

/// Sequences from the proof that translates of J_k are separated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSequences {
    pub x: Vec<[f64; 2]>,
    pub z: Vec<[f64; 2]>,
    pub w: Vec<[f64; 3]>,
    /// (λc−1)·√(1+λc⁻²).
    pub w_spacing: f64,
    pub beta: f64,
    pub m_gap: f64,
    /// Largest deviation of consecutive w distances from `w_spacing`.
    pub max_spacing_error: f64,
}

pub fn projection_sequences<S: Real>(spec: &Spectrum<S>) -> ProjectionSequences {
    let lc = spec.lambda_c;
    let g = lc - S::one();
    let at = a_tilde(lc);
    let n_k = (S::lit(2.0) * at - S::one()).max(S::zero()).to_i64().unwrap_or(0);
    let n_w = g.recip().floor().to_i64().unwrap_or(0);
    let x: Vec<[f64; 2]> = (0..=n_k).map(|n| [(S::int(n) * g).f64(), 0.0]).collect();
    let z: Vec<[f64; 2]> = (0..=n_k)
        .map(|n| [1.0, ((S::one() - S::int(n) * g) / lc).f64()])
        .collect();
    let w_s: Vec<Vec3<S>> = (1..=n_w)
        .map(|n| Vec3::new(S::int(n) * g, S::one(), S::int(n) * g / lc))
        .collect();
    let spacing = g * (S::one() + lc.powi(-2)).sqrt();
    let max_err = w_s
        .windows(2)
        .map(|p| ((p[1] - p[0]).norm() - spacing).abs())
        .fold(S::zero(), |a, b| a.max(b));
    let beta = spacing.atan();
    ProjectionSequences {
        x,
        z,
        w: w_s.iter().map(|v| v.to_f64()).collect(),
        w_spacing: spacing.f64(),
        beta: beta.f64(),
        m_gap: beta.sin().f64(),
        max_spacing_error: max_err.f64(),
    }
}

/// Density of π(J_k) on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentDensity {
    pub k: u32,
    pub grid_n: usize,
    pub spacing: f64,
    pub epsilon: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Splits the lifted segment [p, q] into pieces of length at most `h`.
pub fn split_segment<S: Real>(p: Vec3<S>, q: Vec3<S>, h: S) -> Vec<(Vec3<S>, Vec3<S>)> {
    let len = (q - p).norm();
    let m = (len / h).ceil().to_usize().unwrap_or(1).max(1);
    let step = (q - p) * S::int(m as i64).recip();
    (0..m)
        .map(|i| {
            let a = p + step * S::int(i as i64);
            let b = if i + 1 == m { q } else { a + step };
            (a, b)
        })
        .collect()
}

/// ε such that π(J_k) is ε-dense, on a grid of spacing `spacing`.
pub fn segment_density_with<S: Real>(k: u32, e_c: Vec3<S>, a: S, lambda_c: S, spacing: S) -> Result<SegmentDensity> {
    let g = lambda_c - S::one();
    let d = g / S::lit(4.0);
    if !(spacing <= d) {
        return Err(Error::Resolution(format!(
            "grid spacing {} coarser than d = {}",
            spacing.f64(),
            d.f64()
        )));
    }
    let grid_n = spacing.recip().ceil().to_usize().unwrap_or(1);
    let cells = (g.recip().ceil().to_usize().unwrap_or(4)).clamp(4, 160);
    let h = S::int(cells as i64).recip();
    let pieces = split_segment(e_c * (-a), e_c * a, h);
    let cloud = SegmentCloud::new(pieces, cells);
    let eps = cloud.max_grid_distance(grid_n);
    let bound = S::lit(5.0) * g;
    Ok(SegmentDensity {
        k,
        grid_n,
        spacing: (S::int(grid_n as i64).recip()).f64(),
        epsilon: eps.f64(),
        bound: bound.f64(),
        pass: eps <= bound,
    })
}

/// Grid spacing (λc−1)/4.
pub fn segment_density<S: Real>(k: u32) -> Result<SegmentDensity> {
    let (spec, frame) = frame_for_k::<S>(k)?;
    let lc = spec.lambda_c;
    let a = a_tilde(lc) * frame.v_c.norm();
    segment_density_with(k, frame.e_c, a, lc, (lc - S::one()) / S::lit(4.0))
}

/// Everything the separation lemma talks about, for one k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub k: u32,
    pub a_tilde: f64,
    pub a: f64,
    pub d: f64,
    pub j_endpoints: [[f64; 3]; 2],
    pub min_gap: GapCertificate<f64>,
    pub density: SegmentDensity,
    pub sequences: ProjectionSequences,
    pub gap_pass: bool,
    pub density_pass: bool,
    pub m_gap_pass: bool,
}

pub fn lattice_geometry<S: Real>(k: u32) -> Result<LatticeGeometry> {
    let (spec, frame) = frame_for_k::<S>(k)?;
    let lc = spec.lambda_c;
    let at = a_tilde(lc);
    let a = at * frame.v_c.norm();
    let d = (lc - S::one()) / S::lit(4.0);
    let window = required_window(frame.e_c, a);
    let gap = lattice_min_gap(frame.e_c, a, window);
    let density = segment_density_with(k, frame.e_c, a, lc, d)?;
    let sequences = projection_sequences(&spec);
    let two_d = S::lit(2.0) * d;
    Ok(LatticeGeometry {
        k,
        a_tilde: at.f64(),
        a: a.f64(),
        d: d.f64(),
        j_endpoints: [(frame.e_c * (-a)).to_f64(), (frame.e_c * a).to_f64()],
        min_gap: GapCertificate {
            argmin: gap.argmin,
            distance: gap.distance.f64(),
            window,
        },
        gap_pass: gap.distance > two_d,
        density_pass: density.pass,
        m_gap_pass: sequences.m_gap > two_d.f64(),
        density,
        sequences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_segment_cases() {
        let o = Vec3::new(0.0, 0.0, 0.0);
        let x = Vec3::new(1.0, 0.0, 0.0);
        let d = segment_segment_distance(o, x, Vec3::new(0.5, 1.0, -1.0), Vec3::new(0.5, 1.0, 1.0));
        assert_eq!(d, 1.0);
        let d = segment_segment_distance(o, x, Vec3::new(2.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0));
        assert_eq!(d, 1.0);
        let d = segment_segment_distance(o, x, Vec3::new(0.0, 2.0, 0.0), Vec3::new(1.0, 2.0, 0.0));
        assert_eq!(d, 2.0);
    }

    #[test]
    fn fast_gap_matches_brute_force_small_windows() {
        for k in [5u32, 6, 7, 9, 12, 20] {
            let (spec, frame) = frame_for_k::<f64>(k).unwrap();
            let a = a_tilde(spec.lambda_c) * frame.v_c.norm();
            for w in 1..=5 {
                let fast = lattice_min_gap(frame.e_c, a, w);
                let slow = lattice_min_gap_brute(frame.e_c, a, w);
                assert_eq!(fast.argmin, slow.argmin, "k={k} W={w}");
                assert!((fast.distance - slow.distance).abs() <= 1e-12, "k={k} W={w}");
            }
        }
    }

    #[test]
    fn w_spacing_constant() {
        let (spec, _) = frame_for_k::<f64>(20).unwrap();
        let seq = projection_sequences(&spec);
        let g = spec.lambda_c - 1.0;
        assert_eq!(seq.w[0], [g, 1.0, g / spec.lambda_c]);
        assert!(seq.max_spacing_error <= 1e-12);
        assert!(seq.m_gap > g / 2.0);
    }

    #[test]
    fn coarse_grid_rejected() {
        let (spec, frame) = frame_for_k::<f64>(20).unwrap();
        let a = a_tilde(spec.lambda_c) * frame.v_c.norm();
        let r = segment_density_with(20, frame.e_c, a, spec.lambda_c, 0.5);
        assert!(matches!(r, Err(Error::Resolution(_))));
    }
}
