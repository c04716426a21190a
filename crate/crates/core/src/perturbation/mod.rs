//! Bump profile, center profile and the cylinder map Ψ with its Jacobian.

mod bump;
mod center;
mod cylinder;
pub mod mollifier;
mod record;

pub use bump::{BumpProfile, BUMP_CHECK_SAMPLES};
pub use center::{CenterProfile, PhiValue, CENTER_CHECK_SAMPLES};
pub use cylinder::{verify_tube_lemma, CylinderMap, Jacobian, TubeLemmaReport};
pub use mollifier::MollifierTable;
pub use record::{ProfileRecord, PROFILE_SCHEMA};

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Geometry of the perturbation: half-length `a`, flat half-length `b`,
/// center slope `c`, radius `d` and mollifier half-width `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeParams<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
    pub eps: S,
}

impl<S: Real> TubeParams<S> {
    /// Uses the default mollifier half-width (a−b)/10.
    pub fn new(a: S, b: S, c: S, d: S) -> Result<Self> {
        Self::with_eps(a, b, c, d, (a - b) / S::lit(10.0))
    }

    pub fn with_eps(a: S, b: S, c: S, d: S, eps: S) -> Result<Self> {
        let p = TubeParams { a, b, c, d, eps };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let TubeParams { a, b, c, d, eps } = *self;
        let ok = a > S::one()
            && b > S::zero()
            && b < a
            && c > -S::one()
            && c < S::zero()
            && d > S::zero()
            && eps > S::zero()
            && eps + eps < a - b;
        if ok {
            Ok(())
        } else {
            Err(Error::ParameterOutOfRange(format!(
                "tube parameters need a>1, 0<b<a, −1<c<0, d>0, 0<ε<(a−b)/2; got a={}, b={}, c={}, d={}, ε={}",
                a.f64(),
                b.f64(),
                c.f64(),
                d.f64(),
                eps.f64()
            )))
        }
    }

    /// Upper bound 1 + 2(b/(a−b))|c| on C2.
    pub fn c2_upper(&self) -> S {
        S::one() + S::lit(2.0) * self.b / (self.a - self.b) * self.c.abs()
    }

    /// Upper bound 8(b/d)|c| on |C1| and |C3|.
    pub fn shear_bound(&self) -> S {
        S::lit(8.0) * self.b / self.d * self.c.abs()
    }

    pub fn cast<T: Real>(&self) -> TubeParams<T> {
        TubeParams {
            a: self.a.cast(),
            b: self.b.cast(),
            c: self.c.cast(),
            d: self.d.cast(),
            eps: self.eps.cast(),
        }
    }
}
