//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the geometry and the solvers are generic over.
///
/// Tolerances are carried per type: the defaults for `f64` are the ones the
/// library is specified and tested against, the `f32` values are loosened to
/// what single precision can actually resolve.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Relative epsilon for orientation and incidence predicates.
    const GEOM_EPS: f64;
    /// Allowed deviation of a stored direction from unit length.
    const UNIT_NORM_TOL: f64;
    /// Two directions closer than this (radians) are duplicates.
    const ANGLE_TOL: f64;
    /// Default stopping tolerance of the outer solvers.
    const DEFAULT_TOL: f64;
    /// Default stopping tolerance of the inner Newton solve.
    const INNER_TOL: f64;

    /// Converts an `f64` literal. Every literal used by the crate is
    /// representable (possibly rounded) in every implementing type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn geom_eps() -> Self {
        Self::lit(Self::GEOM_EPS)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const GEOM_EPS: f64 = 1e-12;
    const UNIT_NORM_TOL: f64 = 1e-12;
    const ANGLE_TOL: f64 = 1e-10;
    const DEFAULT_TOL: f64 = 1e-8;
    const INNER_TOL: f64 = 1e-10;
}

impl Scalar for f32 {
    const GEOM_EPS: f64 = 1e-5;
    const UNIT_NORM_TOL: f64 = 1e-6;
    const ANGLE_TOL: f64 = 1e-5;
    const DEFAULT_TOL: f64 = 1e-4;
    const INNER_TOL: f64 = 1e-5;
}
