//! Scalar abstractions.
//!
//! Network evaluation is generic over [`Scalar`] (implemented for `f32` and
//! `f64`). Exact linear algebra in [`crate::width_bound`] is generic over
//! [`ExactField`], implemented for every type with exact field operations,
//! such as `BigRational`.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, Num, Signed};

/// Floating point scalar usable as a network parameter.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    /// Snap radius used when deciding whether an input sits on an even integer.
    fn seam_guard() -> Self;
}

impl Scalar for f64 {
    fn seam_guard() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn seam_guard() -> Self {
        // 1e-12 is below f32 resolution near any nonzero integer.
        1e-6
    }
}

/// A field with exact arithmetic (no rounding).
pub trait ExactField: Clone + Num + Signed + PartialOrd + Debug + Display {
    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

impl<T> ExactField for T where T: Clone + Num + Signed + PartialOrd + Debug + Display {}

/// Converts an `f64` literal into `T`. Panics only if `T` cannot represent finite
/// `f64` values, which never happens for `f32`/`f64`.
#[inline]
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("finite literal")
}
