use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Deepest tree accepted; an oblivious tree stores `2^depth` leaves.
pub const MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Loss {
    /// Squared-error gradients; reported as RMSE.
    #[default]
    #[serde(rename = "RMSE")]
    Rmse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams<T> {
    pub iterations: usize,
    pub learning_rate: T,
    pub depth: usize,
    pub l2_leaf_reg: T,
    pub loss: Loss,
    pub seed: u64,
}

impl<T: Scalar> Default for Hyperparams<T> {
    fn default() -> Self {
        Hyperparams {
            iterations: 600,
            learning_rate: T::from_f64_lossy(0.6),
            depth: 12,
            l2_leaf_reg: T::one(),
            loss: Loss::Rmse,
            seed: 0,
        }
    }
}

impl<T: Scalar> Hyperparams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidHyperparams("iterations must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > T::zero()) {
            return Err(Error::InvalidHyperparams(format!(
                "learning_rate must be finite and > 0, got {}",
                self.learning_rate
            )));
        }
        if self.depth == 0 || self.depth > MAX_DEPTH {
            return Err(Error::InvalidHyperparams(format!(
                "depth must be in 1..={MAX_DEPTH}, got {}",
                self.depth
            )));
        }
        if !(self.l2_leaf_reg.is_finite() && self.l2_leaf_reg >= T::zero()) {
            return Err(Error::InvalidHyperparams(format!(
                "l2_leaf_reg must be finite and >= 0, got {}",
                self.l2_leaf_reg
            )));
        }
        Ok(())
    }
}
