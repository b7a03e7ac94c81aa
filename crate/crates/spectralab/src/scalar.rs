//! Scalar abstraction for the numeric core.
//!
//! Every matrix, network, and diagnostic in this crate is generic over a
//! floating-point scalar so the same code runs in `f32` or `f64`. The
//! binaries and the experiment harness pin `f64`; the generic layer exists
//! so the math stays type-agnostic and the `f32` lane stays compilable and
//! testable at looser tolerances.

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar used throughout the numeric core.
///
/// Implemented for `f32` and `f64`. The bounds are the usual `num-traits`
/// working set plus `Display`/`Debug` for error messages and logs.
pub trait Scalar:
    'static
    + Float
    + FromPrimitive
    + NumAssign
    + Default
    + Send
    + Sync
    + std::fmt::Debug
    + std::fmt::Display
    + std::iter::Sum
{
    /// Lossy conversion back to `f64` for logging and CSV emission.
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

/// Convert an `f64` constant into the active scalar type.
///
/// Shorthand for `T::from_f64(x).unwrap()`; the unwrap cannot fire for the
/// two provided impls.
#[inline]
pub fn c<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_convert_both_lanes() {
        let a: f64 = c(0.25);
        let b: f32 = c(0.25);
        assert_eq!(a, 0.25);
        assert_eq!(b, 0.25f32);
    }
}
