//! Seeded train/test/validation partitioning.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub test_fraction: f64,
    pub val_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.55,
            test_fraction: 0.20,
            val_fraction: 0.25,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn new(train: f64, test: f64, val: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            train_fraction: train,
            test_fraction: test,
            val_fraction: val,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fractions = [self.train_fraction, self.test_fraction, self.val_fraction];
        if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::InvalidSplit(format!("fractions {fractions:?} must each lie in [0, 1]")));
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplit(format!("fractions sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// `(train, test, val)` sizes for `n` rows: rounded train and test
    /// counts, validation takes the remainder.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let train = ((self.train_fraction * n as f64).round() as usize).min(n);
        let test = ((self.test_fraction * n as f64).round() as usize).min(n - train);
        (train, test, n - train - test)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splits<T> {
    pub train: Dataset<T>,
    pub test: Dataset<T>,
    pub validation: Dataset<T>,
}

impl<T: Scalar> Splits<T> {
    pub fn total_len(&self) -> usize {
        self.train.len() + self.test.len() + self.validation.len()
    }
}

/// Shuffles row indices with a ChaCha8 permutation seeded from `spec.seed`
/// and cuts the result into train, test and validation, in that order.
/// All three parts are required to be nonempty.
pub fn split_dataset<T: Scalar>(ds: &Dataset<T>, spec: &SplitSpec) -> Result<Splits<T>> {
    spec.validate()?;
    if ds.is_empty() {
        return Err(Error::Empty("dataset has no rows to split"));
    }
    let n = ds.len();
    let (n_train, n_test, n_val) = spec.sizes(n);
    for (split, size) in [("train", n_train), ("test", n_test), ("validation", n_val)] {
        if size == 0 {
            return Err(Error::EmptySplit { split, rows: n });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));

    let take = |idx: &[usize], label: &str| Dataset {
        rows: idx.iter().map(|&i| ds.rows[i].clone()).collect(),
        provenance: {
            let mut p = ds.provenance.clone();
            p.push(format!("{label} split, seed {}", spec.seed));
            p
        },
    };
    Ok(Splits {
        train: take(&order[..n_train], "train"),
        test: take(&order[n_train..n_train + n_test], "test"),
        validation: take(&order[n_train + n_test..], "validation"),
    })
}
