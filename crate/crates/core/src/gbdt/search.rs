//! Greedy level-wise split search for oblivious trees.
//!
//! A level applies one `(feature, threshold)` test to every current leaf.
//! Candidates are the midpoints between consecutive distinct values of each
//! feature. The score of a partition is `Σ_leaves (Σr)² / (n + λ)`, which is
//! the SSE reduction achieved by L2-regularized leaf values; the gain of a
//! level is the score after the split minus the score before it.
//!
//! With `λ > 0` every real split can have negative gain (splitting leaves
//! whose residuals agree shrinks them twice). The no-op level, gain 0, is
//! then the best choice and the sentinel is returned.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scores closer than this (relative) are treated as equal, so the earlier
/// candidate in (feature, threshold) order wins.
const TIE_RELATIVE: f64 = 1e-11;

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    n_rows: usize,
    n_features: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(n_rows: usize, n_features: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n_rows * n_features {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: n_rows * n_features,
            });
        }
        Ok(FeatureMatrix {
            n_rows,
            n_features,
            data,
        })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let n_features = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * n_features);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_features {
                return Err(Error::Arity {
                    expected: n_features,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(FeatureMatrix {
            n_rows: rows.len(),
            n_features,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn get(&self, row: usize, feature: usize) -> T {
        self.data[row * self.n_features + feature]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice<T> {
    pub feature_index: usize,
    pub threshold: T,
    pub gain: T,
}

impl<T: Scalar> SplitChoice<T> {
    /// Level that sends every row left, leaving the partition unchanged.
    pub fn no_split() -> Self {
        SplitChoice {
            feature_index: 0,
            threshold: T::max_value(),
            gain: T::zero(),
        }
    }

    pub fn is_no_split(&self) -> bool {
        self.threshold == T::max_value()
    }
}

/// Elementwise `target - prediction`, the negative squared-error gradient.
pub fn residuals<T: Scalar>(targets: &[T], predictions: &[T]) -> Result<Vec<T>> {
    if targets.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            left: targets.len(),
            right: predictions.len(),
        });
    }
    if targets.is_empty() {
        return Err(Error::Empty("residuals of an empty vector"));
    }
    Ok(targets.iter().zip(predictions).map(|(y, p)| *y - *p).collect())
}

/// Minimizer of `Σ(r - v)² + λv²`; zero for an empty leaf.
pub fn leaf_value<T: Scalar>(residuals_in_leaf: &[T], l2_leaf_reg: T) -> T {
    if residuals_in_leaf.is_empty() {
        return T::zero();
    }
    let sum: T = residuals_in_leaf.iter().copied().sum();
    sum / (T::from_count(residuals_in_leaf.len()) + l2_leaf_reg)
}

#[inline]
pub(crate) fn leaf_score<T: Scalar>(sum: T, count: usize, l2: T) -> T {
    if count == 0 {
        T::zero()
    } else {
        sum * sum / (T::from_count(count) + l2)
    }
}

/// A threshold `t` with `lo <= t < hi`, as close to the midpoint as the
/// scalar type allows.
pub(crate) fn midpoint<T: Scalar>(lo: T, hi: T) -> T {
    let two = T::one() + T::one();
    let m = lo / two + hi / two;
    if m >= lo && m < hi {
        m
    } else {
        lo
    }
}

/// Search state reused across levels and trees: per-feature row orders are
/// computed once.
pub(crate) struct SplitSearcher<'a, T> {
    x: &'a FeatureMatrix<T>,
    sorted: Vec<Vec<usize>>,
}

impl<'a, T: Scalar> SplitSearcher<'a, T> {
    pub(crate) fn new(x: &'a FeatureMatrix<T>) -> Self {
        let sorted = (0..x.n_features())
            .map(|f| {
                let mut idx: Vec<usize> = (0..x.n_rows()).collect();
                idx.sort_by(|&a, &b| x.get(a, f).partial_cmp(&x.get(b, f)).expect("finite features"));
                idx
            })
            .collect();
        SplitSearcher { x, sorted }
    }

    pub(crate) fn best_split(&self, residuals: &[T], leaf_of: &[usize], n_leaves: usize, l2: T) -> SplitChoice<T> {
        let n = self.x.n_rows();
        let mut sum = vec![T::zero(); n_leaves];
        let mut count = vec![0usize; n_leaves];
        for (row, &leaf) in leaf_of.iter().enumerate() {
            sum[leaf] += residuals[row];
            count[leaf] += 1;
        }
        let occupied: Vec<usize> = (0..n_leaves).filter(|&l| count[l] > 0).collect();
        let before: T = occupied.iter().map(|&l| leaf_score(sum[l], count[l], l2)).sum();

        let mut left_sum = vec![T::zero(); n_leaves];
        let mut left_count = vec![0usize; n_leaves];
        let mut cached = vec![T::zero(); n_leaves];
        let tie = T::from_f64_lossy(TIE_RELATIVE);
        let mut best: Option<(usize, T, T)> = None;

        for (f, order) in self.sorted.iter().enumerate() {
            for &l in &occupied {
                left_sum[l] = T::zero();
                left_count[l] = 0;
                cached[l] = leaf_score(sum[l], count[l], l2);
            }
            let mut total = before;
            let mut i = 0;
            while i < n {
                let value = self.x.get(order[i], f);
                while i < n && self.x.get(order[i], f) == value {
                    let row = order[i];
                    let l = leaf_of[row];
                    total -= cached[l];
                    left_sum[l] += residuals[row];
                    left_count[l] += 1;
                    cached[l] = leaf_score(left_sum[l], left_count[l], l2)
                        + leaf_score(sum[l] - left_sum[l], count[l] - left_count[l], l2);
                    total += cached[l];
                    i += 1;
                }
                if i == n {
                    break;
                }
                let threshold = midpoint(value, self.x.get(order[i], f));
                let better = match best {
                    None => true,
                    Some((_, _, score)) => total > score + tie * score.abs(),
                };
                if better {
                    best = Some((f, threshold, total));
                }
            }
        }

        match best {
            Some((feature_index, threshold, score)) if score - before >= -tie * score.abs().max(before.abs()) => {
                SplitChoice {
                    feature_index,
                    threshold,
                    gain: (score - before).max(T::zero()),
                }
            }
            _ => SplitChoice::no_split(),
        }
    }
}

/// Best single level to add given the current leaf of every row.
///
/// The number of current leaves is `max(leaf_assignment) + 1`. When every
/// feature is constant, or no split has nonnegative gain, the
/// [`SplitChoice::no_split`] sentinel is returned.
pub fn find_best_level_split<T: Scalar>(
    rows: &FeatureMatrix<T>,
    residuals: &[T],
    leaf_assignment: &[usize],
    l2_leaf_reg: T,
) -> Result<SplitChoice<T>> {
    if rows.n_rows() == 0 {
        return Err(Error::Empty("split search needs at least one row"));
    }
    for len in [residuals.len(), leaf_assignment.len()] {
        if len != rows.n_rows() {
            return Err(Error::LengthMismatch {
                left: rows.n_rows(),
                right: len,
            });
        }
    }
    if rows.data.iter().chain(residuals).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("split search input".into()));
    }
    let n_leaves = leaf_assignment.iter().max().map_or(1, |m| m + 1);
    Ok(SplitSearcher::new(rows).best_split(residuals, leaf_assignment, n_leaves, l2_leaf_reg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_examples() {
        assert_eq!(residuals(&[3.0], &[3.0]).unwrap(), vec![0.0]);
        assert_eq!(residuals(&[5.0, 1.0], &[3.0, 2.0]).unwrap(), vec![2.0, -1.0]);
        assert_eq!(residuals(&[0.0], &[4.0]).unwrap(), vec![-4.0]);
        assert!(matches!(residuals(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
        assert!(residuals::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn leaf_value_examples() {
        assert_eq!(leaf_value(&[2.0, 2.0], 1.0), 4.0 / 3.0);
        assert_eq!(leaf_value(&[2.0, 2.0], 0.0), 2.0);
        assert_eq!(leaf_value::<f64>(&[], 5.0), 0.0);
        assert_eq!(leaf_value::<f64>(&[], 0.0), 0.0);
    }

    #[test]
    fn leaf_value_minimizes_penalized_sse() {
        let r = [1.0, -0.5, 3.25, 2.0];
        let lambda = 2.5;
        let objective = |v: f64| r.iter().map(|x| (x - v).powi(2)).sum::<f64>() + lambda * v * v;
        let v = leaf_value(&r, lambda);
        for dv in [-1e-3, 1e-3] {
            assert!(objective(v) < objective(v + dv));
        }
    }

    #[test]
    fn two_point_split() {
        let x = FeatureMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let s = find_best_level_split(&x, &[0.0, 10.0], &[0, 0], 0.0).unwrap();
        assert_eq!(s.feature_index, 0);
        assert_eq!(s.threshold, 1.5);
        assert_eq!(s.gain, 50.0);
    }

    #[test]
    fn constant_rows_give_sentinel() {
        let x = FeatureMatrix::from_rows(&[[1.0, 4.0], [1.0, 4.0], [1.0, 4.0]]).unwrap();
        let s = find_best_level_split(&x, &[1.0, -2.0, 3.0], &[0, 0, 0], 1.0).unwrap();
        assert!(s.is_no_split());
        assert_eq!(s.gain, 0.0);
    }

    #[test]
    fn split_is_shared_across_leaves() {
        // Two current leaves; feature 1 separates residual signs inside both.
        let x = FeatureMatrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        let s = find_best_level_split(&x, &[-1.0, 1.0, -2.0, 2.0], &[0, 0, 1, 1], 0.0).unwrap();
        assert_eq!(s.feature_index, 1);
        assert_eq!(s.threshold, 0.5);
        // Before: 0 + 0. After: 1 + 1 + 4 + 4.
        assert_eq!(s.gain, 10.0);
    }

    #[test]
    fn ties_prefer_lower_feature_then_threshold() {
        // Both features induce the same partition.
        let x = FeatureMatrix::from_rows(&[[0.0, 5.0], [1.0, 6.0], [2.0, 7.0]]).unwrap();
        let s = find_best_level_split(&x, &[0.3, 0.1, 0.7], &[0, 0, 0], 0.0).unwrap();
        assert_eq!(s.feature_index, 0);
        let zero = find_best_level_split(&x, &[0.0, 0.0, 0.0], &[0, 0, 0], 0.0).unwrap();
        assert_eq!((zero.feature_index, zero.threshold, zero.gain), (0, 0.5, 0.0));
    }

    #[test]
    fn midpoint_stays_below_upper_value() {
        assert_eq!(midpoint(1.0, 2.0), 1.5);
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let m = midpoint(a, b);
        assert!(m >= a && m < b);
        let big = midpoint(f64::MAX / 1.5, f64::MAX);
        assert!(big.is_finite());
    }

    #[test]
    fn negative_gain_falls_back_to_sentinel() {
        // Equal residuals: splitting only adds shrinkage when λ > 0.
        let x = FeatureMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let s = find_best_level_split(&x, &[3.0, 3.0], &[0, 0], 1.0).unwrap();
        assert!(s.is_no_split());
        assert_eq!(s.gain, 0.0);
        // Without regularization the same split is neutral and kept.
        let s = find_best_level_split(&x, &[3.0, 3.0], &[0, 0], 0.0).unwrap();
        assert_eq!((s.threshold, s.gain), (1.5, 0.0));
    }

    #[test]
    fn input_validation() {
        let x = FeatureMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(find_best_level_split(&x, &[1.0], &[0, 0], 0.0).is_err());
        assert!(find_best_level_split(&x, &[1.0, f64::NAN], &[0, 0], 0.0).is_err());
        let empty = FeatureMatrix::<f64>::new(0, 3, vec![]).unwrap();
        assert!(find_best_level_split(&empty, &[], &[], 0.0).is_err());
    }

    #[test]
    fn works_for_f32() {
        let x = FeatureMatrix::from_rows(&[[1.0f32], [2.0], [3.0]]).unwrap();
        let s = find_best_level_split(&x, &[0.0f32, 0.0, 9.0], &[0, 0, 0], 0.0).unwrap();
        assert_eq!(s.threshold, 2.5f32);
        assert_eq!(s.gain, 54.0f32);
    }
}
