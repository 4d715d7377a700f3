//! Scalar abstraction shared by the numeric code.
//!
//! Everything that does arithmetic on reflectances, targets, residuals or
//! leaf values is generic over [`Scalar`]. Geographic coordinates and the
//! valid-pixel fraction stay `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + Debug
    + Display
    + FromStr
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossless for counts below 2^24 (f32) / 2^53 (f64).
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Parses a scalar, mapping the `FromStr` error into a message.
pub(crate) fn parse_scalar<T: Scalar>(text: &str) -> Option<T> {
    text.trim().parse::<T>().ok()
}
