//! Floating-point scalar abstraction for the analytical kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Scalar type the closed-form math is generic over: `f32` or `f64`.
///
/// Convergence thresholds inside the kernel derive from `Self::epsilon()`,
/// so each precision converges to its own machine accuracy. The documented
/// error bounds (1e-10 .. 1e-12) hold for `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand for converting an `f64` literal into the working scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}
