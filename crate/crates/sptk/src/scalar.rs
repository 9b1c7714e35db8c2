//! Scalar abstraction: the numeric kernels are generic over any real field
//! that can be built from `f64` literals (`f32`, `f64`).

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Scalar type accepted by every numeric routine in this crate.
pub trait RealScalar: RealField + FromPrimitive + ToPrimitive + Copy {}

impl<T: RealField + FromPrimitive + ToPrimitive + Copy> RealScalar for T {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn cvt<T: RealScalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant not representable in scalar type")
}
