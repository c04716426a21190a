use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radial bump ρ_d(r) = exp(1 − 1/(1 − (r/d)²)) on [0, d], zero at and beyond d.
#[derive(Clone, Debug)]
pub struct BumpProfile<S> {
    d: S,
}

/// Density of the construction-time check of (a1)–(a4).
pub const BUMP_CHECK_SAMPLES: usize = 100_000;

impl<S: Real> BumpProfile<S> {
    pub fn new(d: S) -> Result<Self> {
        if !(d > S::zero() && d.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("bump radius d={}", d.f64())));
        }
        let bump = BumpProfile { d };
        bump.verify(BUMP_CHECK_SAMPLES)?;
        Ok(bump)
    }

    pub fn d(&self) -> S {
        self.d
    }

    fn exponent(&self, r: S) -> Option<S> {
        let x = r / self.d;
        let one_minus = (S::one() - x) * (S::one() + x);
        (one_minus > S::zero()).then(|| x * x / one_minus)
    }

    /// (ρ_d(r), ρ_d′(r)).
    pub fn eval(&self, r: S) -> Result<(S, S)> {
        self.check_domain(r)?;
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: S) -> (S, S) {
        match self.exponent(r) {
            None => (S::zero(), S::zero()),
            Some(g) => {
                let x = r / self.d;
                let one_minus = (S::one() - x) * (S::one() + x);
                let value = (-g).exp();
                let slope = -value * (x + x) / (one_minus * one_minus) / self.d;
                (value, slope)
            }
        }
    }

    /// 1 − ρ_d(r) without cancellation near the axis.
    pub fn one_minus(&self, r: S) -> S {
        match self.exponent(r) {
            None => S::one(),
            Some(g) => -(-g).exp_m1(),
        }
    }

    fn check_domain(&self, r: S) -> Result<()> {
        if r >= S::zero() && r <= self.d {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "bump radius r={} outside [0, {}]",
                r.f64(),
                self.d.f64()
            )))
        }
    }

    /// Checks (a1)–(a4) on `n` equally spaced radii.
    pub fn verify(&self, n: usize) -> Result<()> {
        let fail = |what: &str| Err(Error::Construction(format!("bump profile: {what}")));
        let (v0, s0) = self.eval_unchecked(S::zero());
        if v0 != S::one() || s0 != S::zero() {
            return fail("ρ(0)=1, ρ′(0)=0 violated");
        }
        let (vd, sd) = self.eval_unchecked(self.d);
        if vd != S::zero() || sd != S::zero() {
            return fail("ρ(d)=0, ρ′(d)=0 violated");
        }
        let bound = -S::lit(4.0) / self.d;
        let mut prev = S::one();
        for i in 1..=n {
            let r = self.d * S::from_usize(i).unwrap() / S::from_usize(n).unwrap();
            let (v, s) = self.eval_unchecked(r);
            if v > prev {
                return fail("ρ is not nonincreasing");
            }
            if !(s > bound && s <= S::zero()) || (v > S::zero() && s >= S::zero() && i < n) {
                return fail("−4/d < ρ′ < 0 violated");
            }
            prev = v;
        }
        Ok(())
    }
}
