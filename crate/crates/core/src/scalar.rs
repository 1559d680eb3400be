//! Scalar abstraction shared by the quadratic forms, solvers and fits.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for coefficients and energies: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance used when comparing energies for equality.
    const ENERGY_TOLERANCE: Self;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable as float")
    }

    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }
}

impl Scalar for f64 {
    const ENERGY_TOLERANCE: Self = 1e-9;
}

impl Scalar for f32 {
    const ENERGY_TOLERANCE: Self = 1e-4;
}

/// True when `a` and `b` agree within [`Scalar::ENERGY_TOLERANCE`].
#[inline]
pub fn energy_eq<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= T::ENERGY_TOLERANCE
}
