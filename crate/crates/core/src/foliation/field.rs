//! Distance from torus points to a finite union of short segments, with a
//! bucket grid for the nearest-piece search.

use crate::damap::{min_image, reduce};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Euclidean distance from `q` to the segment [p0, p1] in R³.
pub fn point_segment_distance<S: Real>(q: Vec3<S>, p0: Vec3<S>, p1: Vec3<S>) -> S {
    let d = p1 - p0;
    let dd = d.dot(d);
    let t = if dd > S::zero() {
        ((q - p0).dot(d) / dd).max(S::zero()).min(S::one())
    } else {
        S::zero()
    };
    (q - (p0 + d * t)).norm()
}

/// Short segments on the torus, bucketed on a `g`³ cell grid.
#[derive(Clone, Debug)]
pub struct SegmentCloud<S> {
    pieces: Vec<(Vec3<S>, Vec3<S>)>,
    g: usize,
    cells: Vec<Vec<u32>>,
}

impl<S: Real> SegmentCloud<S> {
    /// Pieces are given by lifted endpoints; each must be shorter than 1/4.
    pub fn new(raw: impl IntoIterator<Item = (Vec3<S>, Vec3<S>)>, g: usize) -> Self {
        let g = g.clamp(4, 256);
        let mut pieces = Vec::new();
        for (p0, p1) in raw {
            let base = p0.map(reduce);
            pieces.push((base, base + (p1 - p0)));
        }
        let mut cells = vec![Vec::new(); g * g * g];
        let gs = S::int(g as i64);
        for (idx, (p0, p1)) in pieces.iter().enumerate() {
            let lo = |i: usize| (p0[i].min(p1[i]) * gs).floor().to_i64().unwrap_or(0);
            let hi = |i: usize| (p0[i].max(p1[i]) * gs).floor().to_i64().unwrap_or(0);
            for cx in lo(0)..=hi(0) {
                for cy in lo(1)..=hi(1) {
                    for cz in lo(2)..=hi(2) {
                        let w = |c: i64| c.rem_euclid(g as i64) as usize;
                        cells[(w(cx) * g + w(cy)) * g + w(cz)].push(idx as u32);
                    }
                }
            }
        }
        for c in cells.iter_mut() {
            c.dedup();
        }
        SegmentCloud { pieces, g, cells }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    fn piece_distance(&self, q: Vec3<S>, idx: usize) -> S {
        let (p0, p1) = self.pieces[idx];
        let half = S::lit(0.5);
        let mid = (p0 + p1) * half;
        let shifted = mid + (q - mid).map(min_image);
        point_segment_distance(shifted, p0, p1)
    }

    /// Torus distance from `q` to the union. Returns early with some value
    /// ≤ `cutoff` once one is found.
    pub fn distance(&self, q: Vec3<S>, cutoff: S) -> S {
        let mut best = S::infinity();
        if self.pieces.is_empty() {
            return best;
        }
        let g = self.g as i64;
        let gs = S::int(g);
        let h = gs.recip();
        let home = q.map(reduce);
        let c: [i64; 3] = [0, 1, 2].map(|i| ((home[i] * gs).floor().to_i64().unwrap_or(0)).min(g - 1));
        let max_ring = g / 2 + 1;
        for ring in 0..=max_ring {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    for dz in -ring..=ring {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                            continue;
                        }
                        let w = |i: usize, d: i64| (c[i] + d).rem_euclid(g) as usize;
                        let cell = &self.cells[(w(0, dx) * self.g + w(1, dy)) * self.g + w(2, dz)];
                        for &idx in cell {
                            let d = self.piece_distance(home, idx as usize);
                            if d < best {
                                best = d;
                            }
                        }
                    }
                }
            }
            if best <= cutoff || best <= S::int(ring) * h {
                break;
            }
            if 2 * ring + 1 >= g {
                // Every cell has been visited.
                break;
            }
        }
        best
    }

    /// Maximum over the `n`³ lattice {i/n} of the distance to the union.
    ///
    /// Branch and bound over blocks of lattice points: a block whose center
    /// distance plus half-diagonal cannot beat the current maximum is dropped.
    pub fn max_grid_distance(&self, n: usize) -> S {
        use rayon::prelude::*;
        if n == 0 {
            return S::zero();
        }
        let coarse = (n / 8).max(1);
        let mut seed = S::zero();
        for i in (0..n).step_by(coarse) {
            for j in (0..n).step_by(coarse) {
                for l in (0..n).step_by(coarse) {
                    seed = seed.max(self.distance(self.lattice_point([i, j, l], n), seed));
                }
            }
        }
        let blocks: Vec<[usize; 3]> = (0..n)
            .step_by(coarse)
            .flat_map(|i| (0..n).step_by(coarse).flat_map(move |j| (0..n).step_by(coarse).map(move |l| [i, j, l])))
            .collect();
        blocks
            .par_iter()
            .map(|&lo| {
                let hi = lo.map(|x| (x + coarse).min(n));
                self.block_max(lo, hi, n, seed)
            })
            .reduce(|| seed, |a, b| a.max(b))
    }

    fn lattice_point(&self, idx: [usize; 3], n: usize) -> Vec3<S> {
        let ns = S::int(n as i64);
        Vec3::new(S::int(idx[0] as i64) / ns, S::int(idx[1] as i64) / ns, S::int(idx[2] as i64) / ns)
    }

    /// Max distance over lattice points in [lo, hi), given a known lower bound.
    fn block_max(&self, lo: [usize; 3], hi: [usize; 3], n: usize, mut best: S) -> S {
        let mut stack = vec![(lo, hi)];
        let ns = S::int(n as i64);
        let half = S::lit(0.5);
        while let Some((lo, hi)) = stack.pop() {
            let count = (0..3).map(|i| hi[i] - lo[i]).product::<usize>();
            if count == 0 {
                continue;
            }
            if count == 1 {
                best = best.max(self.distance(self.lattice_point(lo, n), best));
                continue;
            }
            let span = |i: usize| S::int((hi[i] - lo[i] - 1) as i64) / ns * half;
            let center = Vec3::new(
                S::int(lo[0] as i64) / ns + span(0),
                S::int(lo[1] as i64) / ns + span(1),
                S::int(lo[2] as i64) / ns + span(2),
            );
            let radius = (span(0) * span(0) + span(1) * span(1) + span(2) * span(2)).sqrt();
            let d = self.distance(center, best - radius);
            if d + radius <= best {
                continue;
            }
            let axis = (0..3).max_by_key(|&i| hi[i] - lo[i]).expect("three axes");
            let mid = (lo[axis] + hi[axis]) / 2;
            let (mut hi_a, mut lo_b) = (hi, lo);
            hi_a[axis] = mid;
            lo_b[axis] = mid;
            stack.push((lo_b, hi));
            stack.push((lo, hi_a));
        }
        best
    }

    /// Plain maximum over every lattice point; reference for the search above.
    pub fn max_grid_distance_exhaustive(&self, n: usize) -> S {
        let mut worst = S::zero();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    worst = worst.max(self.distance(self.lattice_point([i, j, l], n), S::zero()));
                }
            }
        }
        worst
    }

    /// Brute-force distance over every piece.
    pub fn distance_exhaustive(&self, q: Vec3<S>) -> S {
        (0..self.pieces.len())
            .map(|i| self.piece_distance(q.map(reduce), i))
            .fold(S::infinity(), |a, b| a.min(b))
    }
}
