//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the geometry is computed in (`f32` or `f64`).
///
/// `RealField` supplies the transcendental functions and the dense linear
/// algebra; the `num-traits` conversions move literals and report values in
/// and out of the generic code.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Central-difference step used for directional derivatives of frame
    /// fields and of the dilation.
    fn fd_step() -> Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion for reports.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn fd_step() -> Self {
        1e-5
    }
}

impl Real for f32 {
    // cube root of machine epsilon, the usual optimum for central differences
    #[inline]
    fn fd_step() -> Self {
        5e-3
    }
}
