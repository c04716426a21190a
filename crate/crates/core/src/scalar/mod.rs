use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::Debug;

mod wide;

/// Extended-precision scalar used for spectral computations.
pub use wide::Wide;

/// Real scalar used throughout the numerical core.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts an integer.
    #[inline]
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("representable integer")
    }

    /// Lossy conversion to `f64`.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts between scalar types via `f64` or directly when wider.
    #[inline]
    fn cast<T: Real>(self) -> T {
        T::lit(self.hi()) + T::lit(self.lo())
    }

    /// Leading `f64` component.
    fn hi(self) -> f64 {
        self.f64()
    }

    /// Trailing `f64` component (nonzero only for double-double).
    fn lo(self) -> f64 {
        0.0
    }
}

impl Real for f32 {}
impl Real for f64 {}

impl Real for Wide {
    fn hi(self) -> f64 {
        self.parts().0
    }

    fn lo(self) -> f64 {
        self.parts().1
    }
}
