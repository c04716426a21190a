//! Strong stable and unstable leaves traced by a predictor-corrector on the
//! pulled-back line fields.

use crate::damap::{LiftPoint, TorusMap, TorusPoint};
use crate::error::{Error, Result};
use crate::hyperbolicity::{stable_slope, unstable_slope};
use crate::linalg::Vec3;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Stable,
    Unstable,
}

/// Polyline in R³ following one strong leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafSegment<S> {
    pub points: Vec<LiftPoint<S>>,
    /// Cumulative arc length at each point.
    pub arc: Vec<S>,
    pub direction: Direction,
    pub step: S,
}

impl<S: Real> LeafSegment<S> {
    pub fn length(&self) -> S {
        self.arc.last().copied().unwrap_or_else(S::zero)
    }

    /// Leading part with arc length at least `length`.
    pub fn prefix(&self, length: S) -> LeafSegment<S> {
        let end = self.arc.iter().position(|&s| s >= length).unwrap_or(self.arc.len() - 1);
        LeafSegment {
            points: self.points[..=end].to_vec(),
            arc: self.arc[..=end].to_vec(),
            direction: self.direction,
            step: self.step,
        }
    }

    /// Consecutive pieces as lifted endpoint pairs; a single point gives one
    /// degenerate piece.
    pub fn pieces(&self) -> Vec<(Vec3<S>, Vec3<S>)> {
        match self.points.len() {
            0 => Vec::new(),
            1 => vec![(self.points[0].0, self.points[0].0)],
            _ => self.points.windows(2).map(|w| (w[0].0, w[1].0)).collect(),
        }
    }

    /// CSV with header `n,x,y,z,arclength`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,x,y,z,arclength\n");
        for (i, (p, s)) in self.points.iter().zip(&self.arc).enumerate() {
            let [x, y, z] = p.0.to_f64();
            writeln!(out, "{i},{x:.17e},{y:.17e},{z:.17e},{:.17e}", s.f64()).expect("string write");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOptions<S> {
    /// Pullback steps per direction estimate.
    pub pullbacks: usize,
    /// Cone width: |v| ≤ width for unstable, |u| ≤ width for stable.
    pub cone: S,
}

/// Unit tangent of the leaf at p in standard coordinates, oriented along
/// +e^u or +e^s, with its B-slope.
pub fn leaf_tangent<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    p: &TorusPoint<S>,
    dir: Direction,
    pullbacks: usize,
) -> Result<(Vec3<S>, S)> {
    let frame = map.frame();
    let (slope, b) = match dir {
        Direction::Unstable => {
            let v = unstable_slope(map, p, pullbacks)?;
            (v, Vec3::new(S::one(), v, S::zero()))
        }
        Direction::Stable => {
            let u = stable_slope(map, p, pullbacks)?;
            (u, Vec3::new(S::zero(), u, S::one()))
        }
    };
    let t = frame.p.mul_vec(b).normalized().ok_or_else(|| Error::Precision("zero tangent".into()))?;
    Ok((t, slope))
}

fn in_cone<S: Real>(slope: S, cone: S, what: &str, at: usize) -> Result<()> {
    if slope.abs() <= cone {
        Ok(())
    } else {
        Err(Error::Geometry(format!(
            "{what} slope {:.3e} left the cone of width {:.3e} at vertex {at}",
            slope.f64(),
            cone.f64()
        )))
    }
}

/// Heun steps of length `step` along the leaf through x until the arc length
/// reaches `length`.
pub fn trace_leaf<S: Real, M: TorusMap<S> + ?Sized>(
    map: &M,
    x: &TorusPoint<S>,
    dir: Direction,
    length: S,
    step: S,
    opts: &TraceOptions<S>,
) -> Result<LeafSegment<S>> {
    if !(length >= S::zero() && step > S::zero()) {
        return Err(Error::ParameterOutOfRange("need L ≥ 0 and step > 0".into()));
    }
    let p_inv = map.frame().p_inv;
    let half = S::lit(0.5);
    let mut pos = x.coords();
    let mut points = vec![LiftPoint(pos)];
    let mut arc = vec![S::zero()];
    let mut s = S::zero();
    let (mut t1, slope) = leaf_tangent(map, x, dir, opts.pullbacks)?;
    in_cone(slope, opts.cone, "tangent", 0)?;
    while s < length {
        let pred = pos + t1 * step;
        let (t2, _) = leaf_tangent(map, &TorusPoint::project(pred), dir, opts.pullbacks)?;
        let next = pos + (t1 + t2) * (step * half);
        let chord = p_inv.mul_vec(next - pos);
        let chord_slope = match dir {
            Direction::Unstable => chord[1] / chord[0],
            Direction::Stable => chord[1] / chord[2],
        };
        in_cone(chord_slope, opts.cone, "chord", points.len())?;
        s = s + (next - pos).norm();
        pos = next;
        points.push(LiftPoint(pos));
        arc.push(s);
        let (t, slope) = leaf_tangent(map, &TorusPoint::project(pos), dir, opts.pullbacks)?;
        in_cone(slope, opts.cone, "tangent", points.len() - 1)?;
        t1 = t;
    }
    Ok(LeafSegment {
        points,
        arc,
        direction: dir,
        step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damap::DAMap;
    use crate::hyperbolicity::{cone_constants, PULLBACKS};

    fn setup() -> (DAMap<f64>, TraceOptions<f64>, f64) {
        let m = DAMap::<f64>::for_k(20).unwrap();
        let c = cone_constants(&m.params).unwrap();
        let h = m.params.tube.d / 4.0;
        (m, TraceOptions { pullbacks: PULLBACKS, cone: c.ku }, h)
    }

    #[test]
    fn off_tube_leaf_is_straight() {
        let (m, opts, h) = setup();
        let opts = TraceOptions { pullbacks: 3, ..opts };
        // Unstable slopes vanish where the backward orbit misses every tube.
        let x = (0..500)
            .map(|i| TorusPoint::new(0.002 * i as f64, 0.41, 0.73))
            .find(|p| unstable_slope(&m, p, 3).unwrap() == 0.0)
            .expect("an unperturbed point");
        let leaf = trace_leaf(&m, &x, Direction::Unstable, 10.0 * h, h, &opts).unwrap();
        let e_u = m.params.frame.e_u;
        for p in &leaf.points {
            let d = p.0 - x.coords();
            assert!((d - e_u * d.dot(e_u)).norm() < 1e-12);
        }
    }

    #[test]
    fn spacing_and_cone_invariants() {
        let (m, opts, h) = setup();
        let leaf = trace_leaf(&m, &TorusPoint::new(0.2, 0.3, 0.4), Direction::Unstable, 0.5, h, &opts).unwrap();
        assert!(leaf.length() >= 0.5);
        let p_inv = m.params.frame.p_inv;
        for w in leaf.points.windows(2) {
            let step = (w[1].0 - w[0].0).norm();
            assert!(step >= h / 2.0 && step <= 2.0 * h);
            let b = p_inv.mul_vec(w[1].0 - w[0].0);
            assert!((b[1] / b[0]).abs() <= opts.cone);
            assert!(b[2].abs() < 1e-9 * step);
        }
        let st = trace_leaf(&m, &TorusPoint::new(0.2, 0.3, 0.4), Direction::Stable, 0.2, h, &TraceOptions {
            cone: cone_constants(&m.params).unwrap().ks,
            ..opts
        })
        .unwrap();
        for w in st.points.windows(2) {
            assert!(p_inv.mul_vec(w[1].0 - w[0].0)[0].abs() < 1e-9 * h);
        }
    }

    #[test]
    fn concatenation_matches_single_trace() {
        let (m, opts, h) = setup();
        let x = TorusPoint::new(0.6, 0.1, 0.9);
        let whole = trace_leaf(&m, &x, Direction::Unstable, 0.4, h, &opts).unwrap();
        let first = trace_leaf(&m, &x, Direction::Unstable, 0.15, h, &opts).unwrap();
        let end = first.points.last().unwrap().project();
        let rest = trace_leaf(&m, &end, Direction::Unstable, 0.4 - first.length(), h, &opts).unwrap();
        let joined: Vec<_> = first.points.iter().chain(&rest.points[1..]).map(|p| p.project()).collect();
        let ref_pts: Vec<_> = whole.points.iter().map(|p| p.project()).collect();
        let gap = |a: &[TorusPoint<f64>], b: &[TorusPoint<f64>]| {
            a.iter()
                .map(|p| b.iter().map(|q| p.distance(q)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let hd = gap(&joined, &ref_pts).max(gap(&ref_pts, &joined));
        assert!(hd <= 2.0 * h, "Hausdorff gap {hd}");
    }

    #[test]
    fn narrow_cone_raises_geometry_error() {
        let (m, opts, h) = setup();
        let narrow = TraceOptions { cone: 1e-12, ..opts };
        let mut saw = false;
        for i in 0..20 {
            let x = TorusPoint::new(0.05 * i as f64, 0.3, 0.7);
            if let Err(Error::Geometry(_)) = trace_leaf(&m, &x, Direction::Unstable, 0.3, h, &narrow) {
                saw = true;
                break;
            }
        }
        assert!(saw);
    }

    #[test]
    fn csv_header_and_rows() {
        let (m, opts, h) = setup();
        let leaf = trace_leaf(&m, &TorusPoint::new(0.1, 0.2, 0.3), Direction::Unstable, 3.0 * h, h, &opts).unwrap();
        let csv = leaf.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,x,y,z,arclength"));
        assert_eq!(lines.count(), leaf.points.len());
    }
}
