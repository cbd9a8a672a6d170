//! Scalar abstraction for the numeric core.
//!
//! Everything that does arithmetic is generic over [`Real`], implemented for
//! `f32` and `f64`. The crate-root aliases pin the shipped pipeline to `f64`.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::distributions::uniform::SampleUniform;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum permittivity ε₀, F/m (CODATA 2018).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Floating-point scalar the simulator is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + SampleUniform
    + core::fmt::Debug
    + core::fmt::Display
    + core::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Speed of light in vacuum, m/s.
    fn speed_of_light() -> Self {
        real(SPEED_OF_LIGHT)
    }

    /// Vacuum permittivity ε₀, F/m.
    fn vacuum_permittivity() -> Self {
        real(VACUUM_PERMITTIVITY)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` literal into the working scalar type.
#[inline]
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("finite literal")
}

/// Lossless-ish round trip back to `f64` for diagnostics and storage.
#[inline]
pub fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
