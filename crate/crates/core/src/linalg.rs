//! Fixed-size 3-vectors and 3×3 matrices over a [`Real`] scalar.

use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3<S>(pub [S; 3]);

impl<S: Real> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([S::zero(); 3])
    }

    /// The `i`-th standard basis vector.
    pub fn unit(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = S::one();
        v
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Vec3(v.map(S::lit))
    }

    pub fn to_f64(self) -> [f64; 3] {
        self.0.map(|x| x.f64())
    }

    pub fn cast<T: Real>(self) -> Vec3<T> {
        Vec3(self.0.map(|x| x.cast()))
    }

    pub fn x(&self) -> S {
        self.0[0]
    }

    pub fn y(&self) -> S {
        self.0[1]
    }

    pub fn z(&self) -> S {
        self.0[2]
    }

    pub fn dot(self, o: Self) -> S {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Self) -> Self {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Vec3([b * f - c * e, c * d - a * f, a * e - b * d])
    }

    pub fn norm(self) -> S {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(self) -> S {
        self.0.iter().fold(S::zero(), |m, x| m.max(x.abs()))
    }

    pub fn scale(self, s: S) -> Self {
        Vec3(self.0.map(|x| x * s))
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > S::zero() && n.is_finite()).then(|| self.scale(n.recip()))
    }

    pub fn map(self, f: impl Fn(S) -> S) -> Self {
        Vec3(self.0.map(f))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl<S: Real> Add for Vec3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<S: Real> Sub for Vec3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<S: Real> Neg for Vec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl<S: Real> Mul<S> for Vec3<S> {
    type Output = Self;
    fn mul(self, s: S) -> Self {
        self.scale(s)
    }
}

impl<S> Index<usize> for Vec3<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S> IndexMut<usize> for Vec3<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.0[i]
    }
}

/// Row-major 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3<S>(pub [[S; 3]; 3]);

impl<S: Real> Mat3<S> {
    pub fn identity() -> Self {
        Self::diag(S::one(), S::one(), S::one())
    }

    pub fn diag(a: S, b: S, c: S) -> Self {
        let z = S::zero();
        Mat3([[a, z, z], [z, b, z], [z, z, c]])
    }

    pub fn from_cols(c0: Vec3<S>, c1: Vec3<S>, c2: Vec3<S>) -> Self {
        Mat3([
            [c0[0], c1[0], c2[0]],
            [c0[1], c1[1], c2[1]],
            [c0[2], c1[2], c2[2]],
        ])
    }

    pub fn from_f64(m: [[f64; 3]; 3]) -> Self {
        Mat3(m.map(|r| r.map(S::lit)))
    }

    pub fn to_f64(self) -> [[f64; 3]; 3] {
        self.0.map(|r| r.map(|x| x.f64()))
    }

    pub fn cast<T: Real>(self) -> Mat3<T> {
        Mat3(self.0.map(|r| r.map(|x| x.cast())))
    }

    pub fn col(&self, j: usize) -> Vec3<S> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn row(&self, i: usize) -> Vec3<S> {
        Vec3(self.0[i])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn mul_vec(&self, v: Vec3<S>) -> Vec3<S> {
        Vec3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let mut out = [[S::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.row(i).dot(o.col(j));
            }
        }
        Mat3(out)
    }

    pub fn det(&self) -> S {
        self.row(0).dot(self.row(1).cross(self.row(2)))
    }

    /// Inverse by the adjugate; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == S::zero() || !det.is_finite() {
            return None;
        }
        let (r0, r1, r2) = (self.row(0), self.row(1), self.row(2));
        let inv = Mat3::from_cols(r1.cross(r2), r2.cross(r0), r0.cross(r1));
        Some(Mat3(inv.0.map(|r| r.map(|x| x / det))))
    }

    /// Largest absolute entry of `self - o`.
    pub fn max_abs_diff(&self, o: &Self) -> S {
        let mut m = S::zero();
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - o.0[i][j]).abs());
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_shear() {
        let m = Mat3::<f64>::from_f64([[1.0, 2.0, 0.0], [0.0, 1.0, 3.0], [0.0, 0.0, 1.0]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul_mat(&inv).max_abs_diff(&Mat3::identity()) < 1e-15);
        assert_eq!(m.det(), 1.0);
    }

    #[test]
    fn cross_is_orthogonal() {
        let a = Vec3::<f64>::new(1.0, 2.0, 3.0);
        let b = Vec3::<f64>::new(-2.0, 0.5, 4.0);
        let c = a.cross(b);
        assert!(c.dot(a).abs() < 1e-14 && c.dot(b).abs() < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = Mat3::<f64>::from_f64([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]);
        assert!(m.inverse().is_none());
    }
}
