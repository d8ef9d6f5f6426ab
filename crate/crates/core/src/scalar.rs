//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point type implementing [`Real`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Floating-point scalar usable throughout the crate (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssignOps
        + Sum
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working scalar type.
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal not representable in scalar type")
}

/// Tolerances stated for `f64` widen for coarser scalar types.
pub(crate) fn scaled_tol<T: Real>(f64_tol: f64) -> T {
    let base: T = real(f64_tol);
    let floor = T::epsilon() * real(8.0);
    if base > floor {
        base
    } else {
        floor
    }
}

pub(crate) fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
