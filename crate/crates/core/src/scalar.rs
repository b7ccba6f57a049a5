//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the physics, modem and detector code is generic over.
///
/// Implemented for `f32` and `f64`. The Kirchhoff quadrature accumulates
/// phases of order `k * distance` (10^5..10^7 rad), so in practice it needs
/// `f64`; everything else is usable at either precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the implemented types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sin(x)/x` with the removable singularity filled in.
#[inline]
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-8) {
        T::one() - x * x / T::lit(6.0)
    } else {
        x.sin() / x
    }
}
