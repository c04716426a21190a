use crate::linalg::Vec3;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Canonical representative in [0,1)³ of a point of the torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint<S>(Vec3<S>);

/// Point of the universal cover R³.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftPoint<S>(pub Vec3<S>);

/// Reduces a coordinate to [0,1); the guard keeps tiny negatives from
/// rounding up to 1.
#[inline]
pub fn reduce<S: Real>(x: S) -> S {
    let r = x - x.floor();
    if r >= S::one() {
        S::zero()
    } else {
        r
    }
}

/// Representative of x − y modulo 1 in [−1/2, 1/2).
#[inline]
pub fn min_image<S: Real>(x: S) -> S {
    let half = S::lit(0.5);
    reduce(x + half) - half
}

impl<S: Real> TorusPoint<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Self::project(Vec3::new(x, y, z))
    }

    pub fn project(v: Vec3<S>) -> Self {
        TorusPoint(v.map(reduce))
    }

    pub fn origin() -> Self {
        TorusPoint(Vec3::zero())
    }

    pub fn coords(&self) -> Vec3<S> {
        self.0
    }

    /// The representative itself as a point of R³.
    pub fn lift(&self) -> LiftPoint<S> {
        LiftPoint(self.0)
    }

    /// Shortest displacement from `self` to `other` (minimum-image convention).
    pub fn delta(&self, other: &Self) -> Vec3<S> {
        (other.0 - self.0).map(min_image)
    }

    /// Euclidean torus distance.
    pub fn distance(&self, other: &Self) -> S {
        self.delta(other).norm()
    }

    pub fn cast<T: Real>(&self) -> TorusPoint<T> {
        TorusPoint(self.0.cast())
    }
}

impl<S: Real> LiftPoint<S> {
    pub fn project(&self) -> TorusPoint<S> {
        TorusPoint::project(self.0)
    }

    /// The same torus point translated into the cell nearest `self`.
    pub fn nearest_lift(&self, p: &TorusPoint<S>) -> LiftPoint<S> {
        let base = self.project();
        LiftPoint(self.0 + base.delta(p))
    }
}
