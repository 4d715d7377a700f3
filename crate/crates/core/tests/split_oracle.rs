mod common;

use aquaboost::find_best_level_split;
use common::{abs_f64, brute_force_split, random_split_instance, rng, to_f64};
use proptest::prelude::*;

fn check(seed: u64) {
    let inst = random_split_instance(&mut rng(seed));
    let got = find_best_level_split(&inst.matrix(), &inst.residuals, &inst.leaves, inst.lambda).unwrap();
    let want = brute_force_split(&inst.rows, &inst.residuals, &inst.leaves, inst.lambda);
    let scale = abs_f64(&want.score_before).max(1.0);
    assert!(
        (got.gain - to_f64(&want.gain)).abs() <= 1e-9 * scale,
        "seed {seed}: gain {} vs oracle {}",
        got.gain,
        to_f64(&want.gain)
    );
    match want.split {
        Some((f, t)) => assert_eq!((got.feature_index, got.threshold), (f, t), "seed {seed}"),
        None => assert!(got.is_no_split(), "seed {seed}"),
    }
}

#[test]
fn matches_brute_force_on_fixed_seeds() {
    for seed in 0..300 {
        check(seed);
    }
}

#[test]
fn hand_enumerated_instance() {
    // Two current leaves, two features; enumerate by hand:
    // feature 0 (values 0,1,2): t=0.5 and t=1.5; feature 1 (values 0,1): t=0.5.
    let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 1.0], vec![2.0, 0.0]];
    let residuals = [4.0, -2.0, 1.0, 3.0];
    let leaves = [0, 0, 1, 1];
    let want = brute_force_split(&rows, &residuals, &leaves, 0.0);
    // Before: 2^2/2 + 4^2/2 = 10.
    // f0 t=0.5: leaf0 -> {4},{-2} = 20, leaf1 stays 8 => gain 18.
    // f0 t=1.5: nothing moves => gain 0.
    // f1 t=0.5: leaf0 -> {-2},{4} = 20, leaf1 -> {3},{1} = 10 => gain 20.
    assert_eq!(want.split, Some((1, 0.5)));
    assert_eq!(to_f64(&want.gain), 20.0);
    let x = aquaboost::gbdt::FeatureMatrix::from_rows(&rows).unwrap();
    let got = find_best_level_split(&x, &residuals, &leaves, 0.0).unwrap();
    assert_eq!((got.feature_index, got.threshold, got.gain), (1, 0.5, 20.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn matches_brute_force(seed in any::<u64>()) {
        check(seed);
    }
}
