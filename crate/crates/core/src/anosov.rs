//! The automorphisms A_k of the 3-torus, their spectra and eigenframes.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::{Real, Wide};
use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

/// Smallest `k` for which the bracket sign table holds.
pub const MIN_K: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix3 {
    pub entries: [[i64; 3]; 3],
}

impl IntMatrix3 {
    pub fn det(&self) -> i64 {
        let m = &self.entries;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn mul(&self, o: &IntMatrix3) -> IntMatrix3 {
        let mut out = [[0i64; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|l| self.entries[i][l] * o.entries[l][j]).sum();
            }
        }
        IntMatrix3 { entries: out }
    }

    pub fn mul_ivec(&self, v: [i64; 3]) -> [i64; 3] {
        let m = &self.entries;
        [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }

    pub fn to_real<S: Real>(&self) -> Mat3<S> {
        Mat3(self.entries.map(|r| r.map(S::int)))
    }

    pub fn mul_vec<S: Real>(&self, v: Vec3<S>) -> Vec3<S> {
        self.to_real::<S>().mul_vec(v)
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < MIN_K {
        return Err(Error::ParameterOutOfRange(format!(
            "k={k}; the eigenvalue brackets require k >= {MIN_K}"
        )));
    }
    Ok(())
}

/// A_k = [[k−1,−1,−1],[1,1,0],[1,0,0]].
pub fn matrix_for_k(k: u32) -> Result<IntMatrix3> {
    check_k(k)?;
    let k = k as i64;
    Ok(IntMatrix3 {
        entries: [[k - 1, -1, -1], [1, 1, 0], [1, 0, 0]],
    })
}

/// A_k⁻¹ = [[0,0,1],[0,1,−1],[−1,−1,k]].
pub fn inverse_matrix_for_k(k: u32) -> Result<IntMatrix3> {
    check_k(k)?;
    Ok(IntMatrix3 {
        entries: [[0, 0, 1], [0, 1, -1], [-1, -1, k as i64]],
    })
}

/// p_k(x) = x³ − kx² + (k+1)x − 1 by Horner's rule.
///
/// Generic over any ring type, so exact rationals work as well as floats.
pub fn char_poly_eval<S: Num + Copy + FromPrimitive>(k: u32, x: S) -> S {
    let kk = S::from_u32(k).expect("k representable");
    ((x - kk) * x + kk + S::one()) * x - S::one()
}

fn char_poly_with_derivative<S: Real>(k: u32, x: S) -> (S, S) {
    let kk = S::from_u32(k).unwrap();
    let p = char_poly_eval(k, x);
    let dp = (S::lit(3.0) * x - kk - kk) * x + kk + S::one();
    (p, dp)
}

/// One row of the bracket sign table.
#[derive(Clone, Copy, Debug)]
pub struct SignEntry<S> {
    pub point: S,
    pub value: S,
    pub positive_expected: bool,
    pub holds: bool,
}

/// The evaluation points 0, 1/k, 1, 1+1/k, 2, k/2, k.
pub fn sign_table_points<S: Real>(k: u32) -> [S; 7] {
    let kk = S::from_u32(k).unwrap();
    let two = S::lit(2.0);
    [S::zero(), kk.recip(), S::one(), S::one() + kk.recip(), two, kk / two, kk]
}

/// Evaluates p_k at the bracket endpoints and checks the expected signs.
pub fn sign_table<S: Real>(k: u32) -> [SignEntry<S>; 7] {
    const POSITIVE: [bool; 7] = [false, true, true, true, false, false, true];
    let pts = sign_table_points::<S>(k);
    std::array::from_fn(|i| {
        let value = char_poly_eval(k, pts[i]);
        let holds = if POSITIVE[i] {
            value > S::zero()
        } else {
            value < S::zero()
        };
        SignEntry {
            point: pts[i],
            value,
            positive_expected: POSITIVE[i],
            holds,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Real> Bracket<S> {
    pub fn contains_strictly(&self, x: S) -> bool {
        self.lo < x && x < self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<S> {
    pub k: u32,
    pub lambda_s: S,
    pub lambda_c: S,
    pub lambda_u: S,
    /// Isolation intervals for (λ_s, λ_c, λ_u).
    pub brackets: [Bracket<S>; 3],
    /// |p_k(λ)| for each root.
    pub residuals: [S; 3],
}

impl<S: Real> Spectrum<S> {
    /// Eigenvalues ordered (λ_s, λ_c, λ_u).
    pub fn eigenvalues(&self) -> [S; 3] {
        [self.lambda_s, self.lambda_c, self.lambda_u]
    }

    pub fn product_error(&self) -> S {
        (self.lambda_s * self.lambda_c * self.lambda_u - S::one()).abs()
    }

    pub fn roots_inside_brackets(&self) -> bool {
        self.eigenvalues()
            .iter()
            .zip(&self.brackets)
            .all(|(l, b)| b.contains_strictly(*l))
    }

    pub fn cast<T: Real>(&self) -> Spectrum<T> {
        let cb = |b: &Bracket<S>| Bracket {
            lo: b.lo.cast(),
            hi: b.hi.cast(),
        };
        Spectrum {
            k: self.k,
            lambda_s: self.lambda_s.cast(),
            lambda_c: self.lambda_c.cast(),
            lambda_u: self.lambda_u.cast(),
            brackets: [cb(&self.brackets[0]), cb(&self.brackets[1]), cb(&self.brackets[2])],
            residuals: self.residuals.map(|r| r.cast()),
        }
    }
}

/// The three isolation intervals (0,1/k), (1+1/k,2), (k/2,k).
pub fn brackets_for_k<S: Real>(k: u32) -> [Bracket<S>; 3] {
    let p = sign_table_points::<S>(k);
    [
        Bracket { lo: p[0], hi: p[1] },
        Bracket { lo: p[3], hi: p[4] },
        Bracket { lo: p[5], hi: p[6] },
    ]
}

fn isolate_root<S: Real>(k: u32, bracket: Bracket<S>, tol: S) -> Result<(S, S)> {
    let width = S::lit(1e-14);
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let lo_negative = char_poly_eval(k, lo) < S::zero();
    let two = S::lit(2.0);
    while hi - lo > width {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if (char_poly_eval(k, mid) < S::zero()) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = (lo + hi) / two;
    for _ in 0..5 {
        let (p, dp) = char_poly_with_derivative(k, x);
        if p == S::zero() || dp == S::zero() {
            break;
        }
        let next = x - p / dp;
        if !bracket.contains_strictly(next) || char_poly_eval(k, next).abs() >= p.abs() {
            break;
        }
        x = next;
    }
    let residual = char_poly_eval(k, x).abs();
    if !(residual <= tol) {
        return Err(Error::Precision(format!(
            "k={k}: residual {:e} exceeds tolerance {:e}",
            residual.f64(),
            tol.f64()
        )));
    }
    Ok((x, residual))
}

/// Isolates the three real roots of p_k inside their brackets.
pub fn solve_spectrum<S: Real>(k: u32, tol: S) -> Result<Spectrum<S>> {
    check_k(k)?;
    if !(tol > S::zero()) {
        return Err(Error::ParameterOutOfRange("tolerance must be positive".into()));
    }
    let table = sign_table::<S>(k);
    if let Some(bad) = table.iter().find(|e| !e.holds) {
        return Err(Error::BracketViolation {
            k,
            detail: format!(
                "p_k({:.6}) = {:e} has the wrong sign",
                bad.point.f64(),
                bad.value.f64()
            ),
        });
    }
    let brackets = brackets_for_k::<S>(k);
    let (s, rs) = isolate_root(k, brackets[0], tol)?;
    let (c, rc) = isolate_root(k, brackets[1], tol)?;
    let (u, ru) = isolate_root(k, brackets[2], tol)?;
    let spec = Spectrum {
        k,
        lambda_s: s,
        lambda_c: c,
        lambda_u: u,
        brackets,
        residuals: [rs, rc, ru],
    };
    if !spec.roots_inside_brackets() {
        return Err(Error::BracketViolation {
            k,
            detail: "a root landed on a bracket endpoint".into(),
        });
    }
    Ok(spec)
}

/// Residual tolerance used for the extended-precision solve.
pub const WIDE_TOLERANCE: f64 = 1e-20;

/// Solves in double-double precision and rounds the result to `S`.
pub fn spectrum<S: Real>(k: u32) -> Result<Spectrum<S>> {
    Ok(solve_spectrum::<Wide>(k, Wide::lit(WIDE_TOLERANCE))?.cast())
}

/// Eigenvectors, their normalisations and the change of basis to B_k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenFrame<S> {
    pub v_s: Vec3<S>,
    pub v_c: Vec3<S>,
    pub v_u: Vec3<S>,
    pub e_s: Vec3<S>,
    pub e_c: Vec3<S>,
    pub e_u: Vec3<S>,
    /// Columns (e_u, e_c, e_s).
    pub p: Mat3<S>,
    pub p_inv: Mat3<S>,
}

/// v = (1, 1/(λ−1), 1/λ).
pub fn eigenvector<S: Real>(lambda: S) -> Result<Vec3<S>> {
    if lambda == S::one() || lambda == S::zero() {
        return Err(Error::DegenerateEigenvector(format!(
            "eigenvalue {} has no eigenvector of the form (1, 1/(λ−1), 1/λ)",
            lambda.f64()
        )));
    }
    Ok(Vec3::new(S::one(), (lambda - S::one()).recip(), lambda.recip()))
}

pub fn eigenframe<S: Real>(spec: &Spectrum<S>) -> Result<EigenFrame<S>> {
    let v_s = eigenvector(spec.lambda_s)?;
    let v_c = eigenvector(spec.lambda_c)?;
    let v_u = eigenvector(spec.lambda_u)?;
    let unit = |v: Vec3<S>| {
        v.normalized()
            .ok_or_else(|| Error::DegenerateEigenvector("zero eigenvector".into()))
    };
    let (e_s, e_c, e_u) = (unit(v_s)?, unit(v_c)?, unit(v_u)?);
    let p = Mat3::from_cols(e_u, e_c, e_s);
    let p_inv = p
        .inverse()
        .ok_or_else(|| Error::DegenerateEigenvector("eigenbasis is singular".into()))?;
    let frame = EigenFrame {
        v_s,
        v_c,
        v_u,
        e_s,
        e_c,
        e_u,
        p,
        p_inv,
    };
    let a = matrix_for_k(spec.k)?.to_real::<S>();
    for (v, l) in [(v_s, spec.lambda_s), (v_c, spec.lambda_c), (v_u, spec.lambda_u)] {
        let r = (a.mul_vec(v) - v.scale(l)).norm();
        if !(r <= S::lit(1e-9) * v.norm()) {
            return Err(Error::Precision(format!(
                "eigenvector residual {:e} at λ={}",
                r.f64(),
                l.f64()
            )));
        }
    }
    Ok(frame)
}

impl<S: Real> EigenFrame<S> {
    /// Standard coordinates → B_k coordinates (u, c, s).
    pub fn to_frame_coords(&self, w: Vec3<S>) -> Vec3<S> {
        self.p_inv.mul_vec(w)
    }

    /// B_k coordinates (u, c, s) → standard coordinates.
    pub fn from_frame_coords(&self, w: Vec3<S>) -> Vec3<S> {
        self.p.mul_vec(w)
    }

    /// Angles of (e_u, e_c, e_s) to the limit directions (1,0,0), (0,1,0), (0,0,1).
    pub fn limit_angles(&self) -> [S; 3] {
        let ang = |e: Vec3<S>, i: usize| e[i].abs().min(S::one()).acos();
        [ang(self.e_u, 0), ang(self.e_c, 1), ang(self.e_s, 2)]
    }

    pub fn cast<T: Real>(&self) -> EigenFrame<T> {
        EigenFrame {
            v_s: self.v_s.cast(),
            v_c: self.v_c.cast(),
            v_u: self.v_u.cast(),
            e_s: self.e_s.cast(),
            e_c: self.e_c.cast(),
            e_u: self.e_u.cast(),
            p: self.p.cast(),
            p_inv: self.p_inv.cast(),
        }
    }
}

/// Builds the frame in double-double precision and rounds it to `S`.
pub fn frame_for_k<S: Real>(k: u32) -> Result<(Spectrum<S>, EigenFrame<S>)> {
    let wide = solve_spectrum::<Wide>(k, Wide::lit(WIDE_TOLERANCE))?;
    let frame = eigenframe(&wide)?;
    Ok((wide.cast(), frame.cast()))
}
