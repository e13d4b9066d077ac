//! Numeric abstraction shared by the fleet, travel, charging and grid models.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point type the models are evaluated in (`f32` or `f64`).
pub trait Scalar: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Absolute tolerance on the sum of a charging profile's hourly fractions.
    const NORMALIZATION_TOL: f64;

    /// Converts an `f64` literal or input value.
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 converts to every float type")
    }

    fn of_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize converts to every float type")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("float converts to f64")
    }

    fn hundred() -> Self {
        Self::of(100.0)
    }
}

impl Scalar for f64 {
    const NORMALIZATION_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const NORMALIZATION_TOL: f64 = 1e-5;
}

/// `min(max(v, lo), hi)` without requiring `Ord`.
pub(crate) fn clamp<T: Scalar>(v: T, lo: T, hi: T) -> T {
    v.max(lo).min(hi)
}
