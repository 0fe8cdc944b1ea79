//! Floating-point scalar abstraction for response evaluation.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::Rational;

/// Floating point type the frequency-domain code is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Literal conversion. Panics only if the type cannot represent a finite f64,
    /// which never happens for the constants used here.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn of_u32(x: u32) -> Self {
        <Self as FromPrimitive>::from_u32(x).expect("u32 fits in float")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize fits in float")
    }

    #[inline]
    fn from_rational(r: Rational) -> Self {
        let num = <Self as FromPrimitive>::from_i64(*r.numer()).expect("numerator fits");
        let den = <Self as FromPrimitive>::from_i64(*r.denom()).expect("denominator fits");
        num / den
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
