//! The elementary universal activation function.

use crate::error::Error;
use crate::scalar::{lit, Scalar};

/// Evaluates the EUAF.
///
/// For `x >= 0` this is the period-2 triangle wave `|x - 2 floor((x + 1) / 2)|`,
/// which equals `x` on `[0, 1]` and `2 - x` on `[1, 2]`. For `x < 0` it is the
/// soft-sign `x / (|x| + 1)`. Output lies in `(-1, 1]`.
///
/// Non-finite input yields a NaN; use [`try_euaf`] for a checked variant.
#[inline]
pub fn euaf<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        let two = lit::<T>(2.0);
        let shifted = x - two * ((x + T::one()) / two).floor();
        let y = shifted.abs();
        // y is the distance to the nearest even integer; snap seam residue.
        if y <= T::seam_guard() * (T::one() + x) {
            T::zero()
        } else {
            y
        }
    } else {
        x / (x.abs() + T::one())
    }
}

/// Checked EUAF: rejects non-finite input.
pub fn try_euaf<T: Scalar>(x: T) -> Result<T, Error> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            context: format!("euaf input {x}"),
        });
    }
    Ok(euaf(x))
}

/// Analytic derivative of the EUAF away from its kinks (positive integers).
pub fn euaf_slope<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        let d = x.abs() + T::one();
        T::one() / (d * d)
    } else {
        let two = lit::<T>(2.0);
        let phase = x - two * (x / two).floor();
        if phase < T::one() {
            T::one()
        } else {
            -T::one()
        }
    }
}
