use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// One level of an oblivious tree: every node at this depth tests the same
/// feature against the same threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level<T> {
    pub feature: usize,
    pub threshold: T,
}

/// A symmetric tree. The leaf index is the bit string of level outcomes,
/// first level most significant, `1` meaning `x[feature] > threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObliviousTree<T> {
    pub levels: Vec<Level<T>>,
    pub leaf_values: Vec<T>,
}

impl<T: Scalar> ObliviousTree<T> {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    #[inline]
    pub fn leaf_index(&self, x: &[T]) -> usize {
        self.levels
            .iter()
            .fold(0, |idx, l| (idx << 1) | usize::from(x[l.feature] > l.threshold))
    }

    #[inline]
    pub fn leaf_for(&self, x: &[T]) -> T {
        self.leaf_values[self.leaf_index(x)]
    }
}
