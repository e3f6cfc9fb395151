//! Scalar abstraction shared by every solver component.

use nalgebra as na;
use num_traits as nt;
use std::fmt::LowerExp;

/// Floating point scalar the discretization and solvers are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances in tests and presets assume `f64`;
/// `f32` is usable for exploratory runs with loosened tolerances.
pub trait Real:
    na::RealField + na::Scalar + Copy + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive + LowerExp
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        na::convert(x)
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        nt::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the type.
    fn epsilon() -> Self;
}

impl Real for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }
}
