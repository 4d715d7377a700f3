#![allow(dead_code)]

use std::path::PathBuf;

use aquaboost::gbdt::FeatureMatrix;
use aquaboost::{BAND_COUNT, Dataset, DatasetRow};
use num::{BigRational, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exhaustive split search in exact rational arithmetic. Shares no code
/// with the library: partitions are formed per candidate from scratch.
/// The no-op level (gain 0) competes with the real candidates and loses
/// ties to them.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleChoice {
    /// `None` when no feature has two distinct values or every split has
    /// negative gain.
    pub split: Option<(usize, f64)>,
    pub gain: BigRational,
    pub score_before: BigRational,
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

fn partition_score(groups: &std::collections::BTreeMap<usize, (BigRational, usize)>, lambda: &BigRational) -> BigRational {
    let mut total = BigRational::zero();
    for (sum, n) in groups.values() {
        if *n > 0 {
            total += sum * sum / (BigRational::from_integer((*n).into()) + lambda);
        }
    }
    total
}

pub fn brute_force_split(rows: &[Vec<f64>], residuals: &[f64], leaves: &[usize], lambda: f64) -> OracleChoice {
    use std::collections::BTreeMap;
    let lambda = exact(lambda);
    let n_features = rows.first().map_or(0, |r| r.len());

    let mut before = BTreeMap::new();
    for (i, &leaf) in leaves.iter().enumerate() {
        let e = before.entry(leaf).or_insert((BigRational::zero(), 0usize));
        e.0 += exact(residuals[i]);
        e.1 += 1;
    }
    let score_before = partition_score(&before, &lambda);

    let mut best: Option<(usize, f64, BigRational)> = None;
    for f in 0..n_features {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let mut groups = BTreeMap::new();
            for (i, row) in rows.iter().enumerate() {
                let child = 2 * leaves[i] + usize::from(row[f] > t);
                let e = groups.entry(child).or_insert((BigRational::zero(), 0usize));
                e.0 += exact(residuals[i]);
                e.1 += 1;
            }
            let score = partition_score(&groups, &lambda);
            if best.as_ref().is_none_or(|(_, _, s)| score > *s) {
                best = Some((f, t, score));
            }
        }
    }
    match best {
        Some((f, t, score)) if score >= score_before => OracleChoice {
            split: Some((f, t)),
            gain: score - &score_before,
            score_before,
        },
        _ => OracleChoice {
            split: None,
            gain: BigRational::zero(),
            score_before,
        },
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap()
}

pub fn abs_f64(r: &BigRational) -> f64 {
    to_f64(&r.abs())
}

/// Small integer-grid instance for the split oracle.
pub struct SplitInstance {
    pub rows: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub leaves: Vec<usize>,
    pub lambda: f64,
}

pub fn random_split_instance(rng: &mut ChaCha8Rng) -> SplitInstance {
    let n = rng.gen_range(1..=64);
    let n_features = rng.gen_range(1..=4);
    let grid = rng.gen_range(2..=8);
    let depth = rng.gen_range(0..=3u32);
    let rows = (0..n)
        .map(|_| (0..n_features).map(|_| rng.gen_range(0..grid) as f64).collect())
        .collect();
    let residuals = (0..n).map(|_| rng.gen_range(-10..=10) as f64).collect();
    let leaves = (0..n).map(|_| rng.gen_range(0..1usize << depth)).collect();
    let lambda = [0.0, 1.0, 3.0, 10.0][rng.gen_range(0..4)];
    SplitInstance {
        rows,
        residuals,
        leaves,
        lambda,
    }
}

impl SplitInstance {
    pub fn matrix(&self) -> FeatureMatrix<f64> {
        FeatureMatrix::from_rows(&self.rows).unwrap()
    }
}

/// Uniform random features on `[0, scale)` and a caller-supplied target.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, scale: f64, target: impl Fn(&[f64; BAND_COUNT]) -> f64) -> Dataset<f64> {
    let rows = (0..n)
        .map(|i| {
            let mut features = [0.0; BAND_COUNT];
            for f in features.iter_mut() {
                *f = rng.gen::<f64>() * scale;
            }
            let target = target(&features);
            DatasetRow {
                record_id: format!("r{i:05}"),
                features,
                target,
            }
        })
        .collect();
    Dataset::new(rows, vec![]).unwrap()
}

/// Integer-grid features, so monotone transforms stay exact.
pub fn grid_dataset(rng: &mut ChaCha8Rng, n: usize, grid: i64) -> Dataset<f64> {
    let rows = (0..n)
        .map(|i| {
            let mut features = [0.0; BAND_COUNT];
            for f in features.iter_mut() {
                *f = rng.gen_range(0..grid) as f64;
            }
            let target = (features[0] - features[3]).abs() + 0.5 * features[7] + rng.gen_range(0.0..1.0);
            DatasetRow {
                record_id: format!("g{i:04}"),
                features,
                target,
            }
        })
        .collect();
    Dataset::new(rows, vec![]).unwrap()
}

pub fn smooth_turbidity(x: &[f64; BAND_COUNT]) -> f64 {
    // Reflectances on the Level-2A integer scale (0..3000).
    3.0 + 2.0 * (x[3] / 700.0).sin() + x[8] / 1500.0 + 0.5 * ((x[2] - x[1]) / 1000.0).powi(2)
}
