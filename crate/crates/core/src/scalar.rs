use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Zero};

/// Real scalar type the algebra, elimination and solver code is generic over.
///
/// Implemented for `f32` and `f64`. Numerical tolerances throughout the crate
/// are tuned for `f64`; `f32` is supported by the algebra layers but the full
/// elimination pipeline needs the wider mantissa in practice.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy conversion used for diagnostics and error payloads.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Commutative ring with identity: the coefficient type of quaternions.
///
/// Scalars implement it, and so do univariate polynomials, which is how the
/// joint-parametrized dual quaternions are represented.
pub trait Ring:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<R> Ring for R where
    R: Clone + Zero + One + Add<Output = R> + Sub<Output = R> + Mul<Output = R> + Neg<Output = R>
{
}

/// `tan(angle / 2)` for an angle given in degrees.
pub fn half_tan_deg<T: Scalar>(deg: T) -> T {
    (deg.to_radians() / T::lit(2.0)).tan()
}

/// Inverse of [`half_tan_deg`]: the angle in degrees whose half-angle tangent is `v`.
pub fn deg_from_half_tan<T: Scalar>(v: T) -> T {
    (T::lit(2.0) * v.atan()).to_degrees()
}
