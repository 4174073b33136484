//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating point scalar the solvers are generic over: `f32` or `f64`.
///
/// Tolerances throughout the crate are specified for `f64`; with `f32` the
/// root finders stop on bracket collapse instead.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self;

    /// Lossy conversion for diagnostics and error payloads.
    fn as_f64(self) -> f64;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Bose occupation `1/(e^x - 1)`, computed with `expm1` so small `x` keeps
/// full precision.
#[inline]
pub fn bose<T: Real>(x: T) -> T {
    x.exp_m1().recip()
}
