//! Plain gradient boosting of oblivious trees on squared-error residuals.

use std::cmp::Ordering;

use crate::band::{BandId, BAND_COUNT};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::gbdt::params::Hyperparams;
use crate::gbdt::search::{FeatureMatrix, SplitSearcher};
use crate::gbdt::tree::{Level, ObliviousTree};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel<T> {
    pub base_prediction: T,
    pub trees: Vec<ObliviousTree<T>>,
    pub hyperparams: Hyperparams<T>,
    pub band_schema: Vec<BandId>,
}

/// Everything `fit` computes along the way.
#[derive(Debug, Clone)]
pub struct FitOutcome<T> {
    pub model: GbdtModel<T>,
    /// Predictions maintained incrementally during boosting, in the input
    /// row order.
    pub train_predictions: Vec<T>,
    /// Training MSE after each boosting round.
    pub train_mse: Vec<T>,
}

impl<T: Scalar> GbdtModel<T> {
    /// Model with no trees; predicts `base_prediction` everywhere.
    pub fn constant(base_prediction: T, hyperparams: Hyperparams<T>) -> Self {
        GbdtModel {
            base_prediction,
            trees: Vec::new(),
            hyperparams,
            band_schema: BandId::ALL.to_vec(),
        }
    }

    pub fn fit(train: &Dataset<T>, hp: &Hyperparams<T>) -> Result<Self> {
        Ok(fit_detailed(train, hp)?.model)
    }

    /// `base + learning_rate · Σ leaf`, routing right iff `x > threshold`.
    pub fn predict(&self, features: &[T]) -> Result<T> {
        if features.len() != self.band_schema.len() {
            return Err(Error::Arity {
                expected: self.band_schema.len(),
                found: features.len(),
            });
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("prediction features".into()));
        }
        Ok(self.predict_unchecked(features))
    }

    pub(crate) fn predict_unchecked(&self, features: &[T]) -> T {
        let leaves = self.trees.iter().fold(T::zero(), |acc, t| acc + t.leaf_for(features));
        self.base_prediction + self.hyperparams.learning_rate * leaves
    }

    pub fn predict_many(&self, rows: &[[T; BAND_COUNT]]) -> Result<Vec<T>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    /// Number of non-sentinel levels using each feature.
    pub fn split_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.band_schema.len()];
        for level in self.trees.iter().flat_map(|t| &t.levels) {
            if level.threshold != T::max_value() {
                counts[level.feature] += 1;
            }
        }
        counts
    }
}

fn lexicographic<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).expect("finite values"))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Trains a model and also returns the incremental training predictions and
/// the per-round training MSE.
///
/// Rows are put into a canonical order (lexicographic on features, then
/// target) before training, so the result does not depend on input order.
pub fn fit_detailed<T: Scalar>(train: &Dataset<T>, hp: &Hyperparams<T>) -> Result<FitOutcome<T>> {
    hp.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("training set has no rows"));
    }
    for row in &train.rows {
        if row.features.iter().any(|v| !v.is_finite()) || !row.target.is_finite() {
            return Err(Error::NonFinite(format!("training row `{}`", row.record_id)));
        }
    }

    let n = train.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&train.rows[a], &train.rows[b]);
        lexicographic(&ra.features, &rb.features).then(ra.target.partial_cmp(&rb.target).expect("finite"))
    });
    let rows: Vec<[T; BAND_COUNT]> = order.iter().map(|&i| train.rows[i].features).collect();
    let targets: Vec<T> = order.iter().map(|&i| train.rows[i].target).collect();
    let x = FeatureMatrix::from_rows(&rows)?;

    let count = T::from_count(n);
    let base = targets.iter().copied().sum::<T>() / count;
    let mut predictions = vec![base; n];
    let mut residuals = vec![T::zero(); n];
    let mut leaf_of = vec![0usize; n];
    let mut trees = Vec::with_capacity(hp.iterations);
    let mut train_mse = Vec::with_capacity(hp.iterations);
    let searcher = SplitSearcher::new(&x);

    for _ in 0..hp.iterations {
        for i in 0..n {
            residuals[i] = targets[i] - predictions[i];
        }
        leaf_of.iter_mut().for_each(|l| *l = 0);

        let mut levels = Vec::with_capacity(hp.depth);
        for depth in 0..hp.depth {
            let choice = searcher.best_split(&residuals, &leaf_of, 1 << depth, hp.l2_leaf_reg);
            for (i, leaf) in leaf_of.iter_mut().enumerate() {
                *leaf = (*leaf << 1) | usize::from(x.get(i, choice.feature_index) > choice.threshold);
            }
            levels.push(Level {
                feature: choice.feature_index,
                threshold: choice.threshold,
            });
        }

        let n_leaves = 1usize << hp.depth;
        let mut sums = vec![T::zero(); n_leaves];
        let mut counts = vec![0usize; n_leaves];
        for (i, &leaf) in leaf_of.iter().enumerate() {
            sums[leaf] += residuals[i];
            counts[leaf] += 1;
        }
        let leaf_values: Vec<T> = sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| if c == 0 { T::zero() } else { s / (T::from_count(c) + hp.l2_leaf_reg) })
            .collect();

        for (i, &leaf) in leaf_of.iter().enumerate() {
            predictions[i] += hp.learning_rate * leaf_values[leaf];
        }
        let sse: T = targets.iter().zip(&predictions).map(|(y, p)| (*y - *p) * (*y - *p)).sum();
        train_mse.push(sse / count);
        trees.push(ObliviousTree { levels, leaf_values });
    }

    let mut train_predictions = vec![T::zero(); n];
    for (sorted_pos, &original) in order.iter().enumerate() {
        train_predictions[original] = predictions[sorted_pos];
    }
    Ok(FitOutcome {
        model: GbdtModel {
            base_prediction: base,
            trees,
            hyperparams: hp.clone(),
            band_schema: BandId::ALL.to_vec(),
        },
        train_predictions,
        train_mse,
    })
}
