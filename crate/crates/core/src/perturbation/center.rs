//! The odd center profile φ_{a,b,c}: linear with slope c on [−b, b], zero
//! with zero slope at ±a, obtained by mollifying a piecewise-linear profile.

use super::mollifier::MollifierTable;
use crate::error::{Error, Result};
use crate::scalar::Real;
use std::sync::Arc;

/// Number of sample points for the construction-time check of (b1)–(b4).
pub const CENTER_CHECK_SAMPLES: usize = 100_000;

#[derive(Clone, Debug)]
pub struct CenterProfile<S> {
    a: S,
    b: S,
    c: S,
    eps: S,
    /// Slope of the middle piece of the piecewise-linear profile.
    slope: S,
    table: Arc<MollifierTable<S>>,
}

/// Pointwise value of the profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiValue<S> {
    pub value: S,
    pub slope: S,
    /// φ′ − c, computed without cancellation.
    pub excess: S,
}

impl<S: Real> CenterProfile<S> {
    pub fn new(a: S, b: S, c: S, eps: S, table: Arc<MollifierTable<S>>) -> Result<Self> {
        let ok = b > S::zero()
            && a > b
            && c > -S::one()
            && c < S::zero()
            && eps > S::zero()
            && b + eps < a - eps;
        if !ok {
            return Err(Error::ParameterOutOfRange(format!(
                "center profile needs 0<b<a, −1<c<0, 0<ε, b+ε<a−ε (a={}, b={}, c={}, ε={})",
                a.f64(),
                b.f64(),
                c.f64(),
                eps.f64()
            )));
        }
        let slope = -(b + eps) * c / (a - b - eps - eps);
        let profile = CenterProfile {
            a,
            b,
            c,
            eps,
            slope,
            table,
        };
        profile.verify(CENTER_CHECK_SAMPLES)?;
        Ok(profile)
    }

    pub fn a(&self) -> S {
        self.a
    }

    pub fn b(&self) -> S {
        self.b
    }

    pub fn c(&self) -> S {
        self.c
    }

    pub fn eps(&self) -> S {
        self.eps
    }

    pub fn middle_slope(&self) -> S {
        self.slope
    }

    pub fn table(&self) -> &MollifierTable<S> {
        &self.table
    }

    /// Upper bound 2(b/(a−b))|c| on φ′.
    pub fn slope_cap(&self) -> S {
        S::lit(2.0) * self.b / (self.a - self.b) * self.c.abs()
    }

    /// (φ(y), φ′(y)).
    pub fn eval(&self, y: S) -> Result<(S, S)> {
        let v = self.eval_full(y)?;
        Ok((v.value, v.slope))
    }

    pub fn eval_full(&self, y: S) -> Result<PhiValue<S>> {
        if !(y.abs() <= self.a) {
            return Err(Error::Domain(format!(
                "center coordinate y={} outside [−{a}, {a}]",
                y.f64(),
                a = self.a.f64()
            )));
        }
        Ok(self.eval_unchecked(y))
    }

    pub(crate) fn eval_unchecked(&self, y: S) -> PhiValue<S> {
        let x = y.abs();
        let (value, slope, excess) = self.eval_nonnegative(x);
        let value = if y < S::zero() { -value } else { value };
        PhiValue {
            value,
            slope,
            excess,
        }
    }

    fn eval_nonnegative(&self, x: S) -> (S, S, S) {
        let (a, b, c, eps, s) = (self.a, self.b, self.c, self.eps, self.slope);
        if x <= b {
            return (c * x, c, S::zero());
        }
        if x >= a {
            return (S::zero(), S::zero(), -c);
        }
        let p1 = b + eps;
        let p2 = a - eps;
        let u1 = (x - p1) / eps;
        let u2 = (x - p2) / eps;
        let t = &self.table;
        if u1 >= S::one() {
            let w = (p2 - x) / eps;
            let slope = s * t.cdf(w);
            return (-s * eps * t.ramp(w), slope, slope - c);
        }
        let (f1, f2) = (t.cdf(u1), t.cdf(u2));
        let value = c * x + (s - c) * eps * t.ramp(u1) - s * eps * t.ramp(u2);
        let excess = -c * f1 + s * (f1 - f2);
        (value, c + excess, excess)
    }

    /// Checks (b1)–(b4) and oddness on `n` sample points of [0, a].
    pub fn verify(&self, n: usize) -> Result<()> {
        let fail = |what: String| Err(Error::Construction(format!("center profile: {what}")));
        let (a, b, c) = (self.a, self.b, self.c);
        let end = self.eval_unchecked(a);
        if end.value != S::zero() || end.slope != S::zero() {
            return fail("φ(a)=0, φ′(a)=0 violated".into());
        }
        let cap = self.slope_cap();
        let size_cap = S::lit(2.0) * b * c.abs();
        // Below this distance from b the excess φ′−c underflows.
        let band = self.eps * S::lit(1e-3);
        for i in 0..=n {
            let x = a * S::from_usize(i).unwrap() / S::from_usize(n).unwrap();
            let v = self.eval_unchecked(x);
            let m = self.eval_unchecked(-x);
            if m.value != -v.value || m.slope != v.slope {
                return fail(format!("oddness fails at {}", x.f64()));
            }
            if x <= b && (v.value != c * x || v.slope != c) {
                return fail(format!("φ(x)=cx fails at {}", x.f64()));
            }
            if v.excess < S::zero() || !(v.slope < cap) {
                return fail(format!("c ≤ φ′ < 2(b/(a−b))|c| fails at {}", x.f64()));
            }
            if x > b + band && v.excess <= S::zero() {
                return fail(format!("φ′ = c away from [−b, b] at {}", x.f64()));
            }
            if !(v.value.abs() < size_cap) {
                return fail(format!("|φ| < 2b|c| fails at {}", x.f64()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::mollifier::DEFAULT_NODES;
    use super::*;

    fn profile() -> CenterProfile<f64> {
        let table = Arc::new(MollifierTable::new(DEFAULT_NODES));
        CenterProfile::new(10.0, 6.0, -0.3, 0.4, table).unwrap()
    }

    #[test]
    fn anchors() {
        let p = profile();
        assert_eq!(p.eval(0.0).unwrap(), (0.0, -0.3));
        assert_eq!(p.eval(5.0).unwrap(), (-1.5, -0.3));
        assert_eq!(p.eval(10.0).unwrap(), (0.0, 0.0));
        assert_eq!(p.eval(-10.0).unwrap(), (0.0, 0.0));
        assert!(p.eval(10.5).is_err());
    }

    #[test]
    fn slope_is_derivative_of_value() {
        let p = profile();
        let h = 1e-6;
        for i in 0..400 {
            let y = -9.99 + 19.98 * i as f64 / 399.0;
            let (v0, _) = p.eval(y - h).unwrap();
            let (v1, _) = p.eval(y + h).unwrap();
            let (_, s) = p.eval(y).unwrap();
            assert!(((v1 - v0) / (2.0 * h) - s).abs() < 1e-7, "y={y}");
        }
    }

    #[test]
    fn smooth_joins() {
        let p = profile();
        let h = 1e-5;
        for &y in &[6.0, -6.0, 10.0 - 2e-5, -10.0 + 2e-5] {
            let (l, _) = p.eval(y - h).unwrap();
            let (m, _) = p.eval(y).unwrap();
            let (r, _) = p.eval(y + h).unwrap();
            let left = (m - l) / h;
            let right = (r - m) / h;
            assert!((left - right).abs() < 1e-8, "y={y}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let table = Arc::new(MollifierTable::<f64>::new(64));
        assert!(CenterProfile::new(10.0, 6.0, 0.3, 0.4, table.clone()).is_err());
        assert!(CenterProfile::new(10.0, 6.0, -0.3, 2.5, table).is_err());
    }
}
