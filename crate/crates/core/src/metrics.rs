use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Population (divide-by-n) regression errors for one prediction set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics<T> {
    pub mse: T,
    pub mae: T,
    pub n: usize,
}

impl<T: Scalar> Metrics<T> {
    pub fn rmse(&self) -> T {
        self.mse.sqrt()
    }
}

impl<T: Scalar> Serialize for Metrics<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Metrics", 4)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("mse", &self.mse)?;
        s.serialize_field("rmse", &self.rmse())?;
        s.serialize_field("mae", &self.mae)?;
        s.end()
    }
}

pub fn compute_metrics<T: Scalar>(expected: &[T], predicted: &[T]) -> Result<Metrics<T>> {
    if expected.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: expected.len(),
            right: predicted.len(),
        });
    }
    if expected.is_empty() {
        return Err(Error::Empty("metrics of an empty prediction set"));
    }
    if expected.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("metric inputs".into()));
    }
    let n = expected.len();
    let count = T::from_count(n);
    let (mut sq, mut abs) = (T::zero(), T::zero());
    for (e, p) in expected.iter().zip(predicted) {
        let d = *e - *p;
        sq += d * d;
        abs += d.abs();
    }
    let mse = sq / count;
    // mae <= rmse holds exactly; equal-magnitude errors can round past it.
    let mae = (abs / count).min(mse.sqrt());
    Ok(Metrics { mse, mae, n })
}
