//! Double-double scalar over `twofloat::TwoFloat`.
//!
//! Addition, subtraction and multiplication are the library's. Division and
//! reciprocal are replaced: the library's versions form 1 − y_hi·(1/y_hi)
//! without a fused multiply-add, which cancels to zero whenever the product
//! rounds to one and leaves an `f64`-accurate quotient. Conversions from
//! `f64` and integers are exact.

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use twofloat::TwoFloat;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Wide(TwoFloat);

impl Wide {
    /// Leading and trailing components; `hi` is the value rounded to `f64`.
    pub fn parts(self) -> (f64, f64) {
        (self.0.hi(), self.0.lo())
    }

    fn from_f64_exact(x: f64) -> Self {
        Wide(<TwoFloat as From<f64>>::from(x))
    }

    /// Exact for every i64.
    fn from_i64_exact(n: i64) -> Self {
        let hi = n as f64;
        // |n − hi| < 2^11, so the remainder fits an f64 exactly; the i128
        // keeps it from overflowing when hi rounds up to 2^63.
        let lo = (n as i128 - hi as i128) as f64;
        Wide(TwoFloat::new_add(hi, lo))
    }

    /// Double-double division with relative error below 15u² + 56u³
    /// (Joldes, Muller, Popescu 2017, Algorithm 17).
    fn quotient(self, rhs: Wide) -> Wide {
        let (xh, xl) = self.parts();
        let (yh, _) = rhs.parts();
        let th = xh / yh;
        if !th.is_finite() || th == 0.0 {
            return Wide::from_f64_exact(th);
        }
        let r = rhs.0 * th;
        let pi_h = xh - r.hi();
        let d_l = xl - r.lo();
        let tl = (pi_h + d_l) / yh;
        Wide(TwoFloat::new_add(th, tl))
    }
}

impl From<f64> for Wide {
    fn from(x: f64) -> Self {
        Wide::from_f64_exact(x)
    }
}

impl fmt::Debug for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (hi, lo) = self.parts();
        write!(f, "Wide({hi:e} + {lo:e})")
    }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr for Wide {
            type Output = Wide;
            #[inline]
            fn $f(self, rhs: Wide) -> Wide {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $atr for Wide {
            #[inline]
            fn $af(&mut self, rhs: Wide) {
                *self = $tr::$f(*self, rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, |a, b| Wide(a.0 + b.0));
binop!(Sub, sub, SubAssign, sub_assign, |a, b| Wide(a.0 - b.0));
binop!(Mul, mul, MulAssign, mul_assign, |a, b| Wide(a.0 * b.0));
binop!(Div, div, DivAssign, div_assign, |a, b| a.quotient(b));
binop!(Rem, rem, RemAssign, rem_assign, |a, b| a - (a / b).trunc() * b);

impl Neg for Wide {
    type Output = Wide;
    #[inline]
    fn neg(self) -> Wide {
        Wide(-self.0)
    }
}

impl Zero for Wide {
    fn zero() -> Self {
        Wide(<TwoFloat as From<f64>>::from(0.0))
    }

    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0
    }
}

impl One for Wide {
    fn one() -> Self {
        Wide(<TwoFloat as From<f64>>::from(1.0))
    }
}

impl Num for Wide {
    type FromStrRadixErr = <TwoFloat as Num>::FromStrRadixErr;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        TwoFloat::from_str_radix(s, radix).map(Wide)
    }
}

impl ToPrimitive for Wide {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }

    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    fn to_f64(&self) -> Option<f64> {
        Some(self.0.hi() + self.0.lo())
    }
}

impl FromPrimitive for Wide {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Wide::from_i64_exact(n))
    }

    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Wide(TwoFloat::new_add(hi, lo)))
    }

    fn from_f64(x: f64) -> Option<Self> {
        Some(Wide::from_f64_exact(x))
    }
}

impl NumCast for Wide {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        let f = n.to_f64()?;
        match n.to_i64() {
            // Integral source: split exactly instead of rounding to f64.
            Some(i) if i as f64 == f => Some(Wide::from_i64_exact(i)),
            _ => Some(Wide::from_f64_exact(f)),
        }
    }
}

macro_rules! consts {
    ($($c:ident),*) => {
        $(fn $c() -> Self { Wide(TwoFloat::$c()) })*
    };
}

impl FloatConst for Wide {
    consts!(
        E, FRAC_1_PI, FRAC_1_SQRT_2, FRAC_2_PI, FRAC_2_SQRT_PI, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6,
        FRAC_PI_8, LN_10, LN_2, LOG10_E, LOG2_E, PI, SQRT_2
    );
}

macro_rules! lift0 {
    ($($f:ident),*) => { $(fn $f() -> Self { Wide(<TwoFloat as Float>::$f()) })* };
}
macro_rules! lift1 {
    ($($f:ident),*) => { $(fn $f(self) -> Self { Wide(<TwoFloat as Float>::$f(self.0)) })* };
}
macro_rules! lift2 {
    ($($f:ident),*) => { $(fn $f(self, o: Self) -> Self { Wide(<TwoFloat as Float>::$f(self.0, o.0)) })* };
}
macro_rules! pred {
    ($($f:ident),*) => { $(fn $f(self) -> bool { <TwoFloat as Float>::$f(self.0) })* };
}

/// Transcendental functions are the library's.
impl Float for Wide {
    lift0!(nan, infinity, neg_infinity, neg_zero, min_value, min_positive_value, epsilon, max_value);
    lift1!(
        floor, ceil, round, trunc, fract, abs, signum, exp, exp2, ln, log2, log10, cbrt, sin, cos, tan, asin,
        acos, atan, exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh
    );
    lift2!(max, min, abs_sub, atan2);
    pred!(is_nan, is_infinite, is_finite, is_normal, is_sign_positive, is_sign_negative);

    fn classify(self) -> FpCategory {
        self.0.classify()
    }

    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }

    fn recip(self) -> Self {
        Wide::one() / self
    }

    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Wide::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    fn powf(self, n: Self) -> Self {
        (self.ln() * n).exp()
    }

    /// One Newton correction of the `f64` root.
    fn sqrt(self) -> Self {
        let (hi, _) = self.parts();
        if !(hi > 0.0) || !hi.is_finite() {
            return Wide::from_f64_exact(hi.sqrt());
        }
        let s = Wide::from_f64_exact(hi.sqrt());
        s + (self - s * s) / (s + s)
    }

    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }

    fn hypot(self, o: Self) -> Self {
        (self * self + o * o).sqrt()
    }

    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }

    fn integer_decode(self) -> (u64, i16, i8) {
        self.0.hi().integer_decode()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(x: f64) -> Wide {
        <Wide as From<f64>>::from(x)
    }

    #[test]
    fn division_keeps_the_low_word() {
        for d in [3.0, 5.0, 7.0, 20.0, 64.0 * 64.0 * 64.0 + 1.0] {
            let q = lit(1.0) / lit(d);
            let resid = (q * lit(d) - lit(1.0)).abs();
            assert!(resid.to_f64().unwrap() < 1e-31, "d={d}: {q:?}");
        }
        // 1/3 = 0.333… with the tail 1/3 − fl(1/3) = 1/(3·2^54).
        let (hi, lo) = (lit(1.0) / lit(3.0)).parts();
        assert_eq!(hi, 1.0 / 3.0);
        assert!((lo - 1.0 / (3.0 * 2f64.powi(54))).abs() < 1e-33);
    }

    #[test]
    fn division_by_wide_divisor() {
        let y = lit(1.0) / lit(7.0) + lit(3.0);
        let x = lit(2.0) / lit(11.0);
        let q = x / y;
        assert!(((q * y - x).abs() / x).to_f64().unwrap() < 1e-31);
    }

    #[test]
    fn integer_conversions_exact() {
        let n = (1i64 << 60) + 3;
        let w = Wide::from_i64(n).unwrap();
        assert_eq!(w.to_i64(), Some(n));
        assert_eq!(<Wide as NumCast>::from(n).unwrap(), w);
        assert_eq!(Wide::from_i64(i64::MAX).unwrap().to_i64(), Some(i64::MAX));
        assert_eq!(Wide::from_f64(2.5).unwrap().to_f64(), Some(2.5));
    }

    #[test]
    fn sqrt_and_powers() {
        let two = lit(2.0);
        let r = two.sqrt();
        assert!((r * r - two).abs().to_f64().unwrap() < 1e-31);
        let k = lit(20.0);
        assert_eq!(k.powi(3), lit(8000.0));
        assert!(((k.powi(-3) * lit(8000.0)) - lit(1.0)).abs().to_f64().unwrap() < 1e-31);
        assert_eq!((lit(7.5) % lit(2.0)), lit(1.5));
    }

    #[test]
    fn ordering_and_specials() {
        assert!(lit(1.0) < lit(1.0) + lit(1e-20));
        assert!((lit(1.0) / lit(0.0)).is_infinite());
        assert!((lit(0.0) / lit(0.0)).is_nan());
    }
}
