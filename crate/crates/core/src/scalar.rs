use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real scalar the floating-point routines are generic over.
///
/// Implemented for `f32` and `f64`. Conversions from literals and integers
/// go through [`Scalar::of`] and friends, which cannot fail for either type.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + FftNum + Debug + Display + Send + Sync
{
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable")
    }

    #[inline]
    fn of_u64(n: u64) -> Self {
        Self::from_u64(n).expect("u64 is representable")
    }

    #[inline]
    fn of_i64(n: i64) -> Self {
        Self::from_i64(n).expect("i64 is representable")
    }

    #[inline]
    fn of_i128(n: i128) -> Self {
        Self::from_i128(n).expect("i128 is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// Euler's constant at this precision.
    #[inline]
    fn euler_gamma() -> Self {
        Self::of(crate::arith::EULER_GAMMA)
    }

    /// Fractional part in `[0, 1)`.
    #[inline]
    fn frac01(self) -> Self {
        let f = self - self.floor();
        // `floor` can leave exactly 1.0 for tiny negative inputs
        if f >= Self::one() {
            Self::zero()
        } else {
            f
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
