//! JSON model files.
//!
//! Numbers are written as the shortest decimal that parses back to the same
//! binary value, and read with correctly rounded parsing, so a saved model
//! reproduces predictions bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::band::BandId;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::gbdt::boost::GbdtModel;
use crate::gbdt::params::Hyperparams;
use crate::gbdt::tree::{Level, ObliviousTree};
use crate::scalar::Scalar;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile<T> {
    format_version: u32,
    band_schema: Vec<String>,
    hyperparams: Hyperparams<T>,
    base_prediction: T,
    trees: Vec<TreeFile<T>>,
}

#[derive(Serialize, Deserialize)]
struct TreeFile<T> {
    levels: Vec<Level<T>>,
    leaf_values: Vec<T>,
}

pub fn model_to_json<T: Scalar>(model: &GbdtModel<T>) -> Result<Vec<u8>> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        band_schema: model.band_schema.iter().map(|b| b.name().to_string()).collect(),
        hyperparams: model.hyperparams.clone(),
        base_prediction: model.base_prediction,
        trees: model
            .trees
            .iter()
            .map(|t| TreeFile {
                levels: t.levels.clone(),
                leaf_values: t.leaf_values.clone(),
            })
            .collect(),
    };
    Ok(serde_json::to_vec(&file)?)
}

pub fn model_from_json<T: Scalar>(bytes: &[u8]) -> Result<GbdtModel<T>> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| Error::Corrupt(e.to_string()))?;

    let version = value
        .get("format_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Corrupt("missing format_version".into()))?;
    if version != u64::from(MODEL_FORMAT_VERSION) {
        return Err(Error::Version {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: MODEL_FORMAT_VERSION,
        });
    }

    let schema = value
        .get("band_schema")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Corrupt("missing band_schema".into()))?;
    let names: Vec<&str> = schema.iter().filter_map(Value::as_str).collect();
    let canonical: Vec<&str> = BandId::ALL.iter().map(|b| b.name()).collect();
    if names.len() != schema.len() || names != canonical {
        return Err(Error::Schema(format!(
            "model band schema has {} entries {:?}, expected {:?}",
            schema.len(),
            names,
            canonical
        )));
    }

    let file: ModelFile<T> = serde_json::from_value(value).map_err(|e| Error::Corrupt(e.to_string()))?;
    file.hyperparams
        .validate()
        .map_err(|e| Error::Corrupt(format!("hyperparams: {e}")))?;
    if !file.base_prediction.is_finite() {
        return Err(Error::Corrupt("base_prediction is not finite".into()));
    }
    if file.trees.len() > file.hyperparams.iterations {
        return Err(Error::Corrupt(format!(
            "{} trees exceed {} iterations",
            file.trees.len(),
            file.hyperparams.iterations
        )));
    }
    let mut trees = Vec::with_capacity(file.trees.len());
    for (i, t) in file.trees.into_iter().enumerate() {
        if t.levels.len() > 63 || t.leaf_values.len() != 1usize << t.levels.len() {
            return Err(Error::Corrupt(format!("tree {i}: leaf count does not match depth")));
        }
        if t.levels
            .iter()
            .any(|l| l.feature >= canonical.len() || !l.threshold.is_finite())
        {
            return Err(Error::Corrupt(format!("tree {i}: invalid level")));
        }
        if t.leaf_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Corrupt(format!("tree {i}: non-finite leaf value")));
        }
        trees.push(ObliviousTree {
            levels: t.levels,
            leaf_values: t.leaf_values,
        });
    }
    Ok(GbdtModel {
        base_prediction: file.base_prediction,
        trees,
        hyperparams: file.hyperparams,
        band_schema: BandId::ALL.to_vec(),
    })
}

pub fn save_model<T: Scalar>(model: &GbdtModel<T>, path: &Path) -> Result<()> {
    fsutil::write_atomic(path, &model_to_json(model)?)
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<GbdtModel<T>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::BAND_COUNT;
    use crate::dataset::{Dataset, DatasetRow};
    use proptest::prelude::*;

    fn small_model() -> GbdtModel<f64> {
        let rows = (0..20)
            .map(|i| {
                let mut features = [0.0; BAND_COUNT];
                for (b, f) in features.iter_mut().enumerate() {
                    *f = ((i * 7 + b * 3) % 11) as f64 / 3.0;
                }
                DatasetRow {
                    record_id: format!("r{i}"),
                    features,
                    target: (i as f64 * 0.1).exp(),
                }
            })
            .collect();
        let hp = Hyperparams {
            iterations: 5,
            depth: 3,
            ..Hyperparams::default()
        };
        GbdtModel::fit(&Dataset::new(rows, vec![]).unwrap(), &hp).unwrap()
    }

    #[test]
    fn json_layout() {
        let json: Value = serde_json::from_slice(&model_to_json(&small_model()).unwrap()).unwrap();
        assert_eq!(json["format_version"], 1);
        assert_eq!(json["band_schema"].as_array().unwrap().len(), 12);
        assert_eq!(json["hyperparams"]["loss"], "RMSE");
        assert_eq!(json["trees"][0]["levels"].as_array().unwrap().len(), 3);
        assert!(json["trees"][0]["levels"][0]["feature"].is_u64());
        assert_eq!(json["trees"][0]["leaf_values"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn thirteen_band_schema_is_rejected() {
        let mut json: Value = serde_json::from_slice(&model_to_json(&small_model()).unwrap()).unwrap();
        json["band_schema"].as_array_mut().unwrap().push("B10".into());
        let bytes = serde_json::to_vec(&json).unwrap();
        assert!(matches!(model_from_json::<f64>(&bytes), Err(Error::Schema(_))));
    }

    #[test]
    fn version_mismatch() {
        let mut json: Value = serde_json::from_slice(&model_to_json(&small_model()).unwrap()).unwrap();
        json["format_version"] = 2.into();
        let bytes = serde_json::to_vec(&json).unwrap();
        assert!(matches!(
            model_from_json::<f64>(&bytes),
            Err(Error::Version { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let bytes = model_to_json(&small_model()).unwrap();
        for cut in [1, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(model_from_json::<f64>(&bytes[..cut]), Err(Error::Corrupt(_))));
        }
    }

    #[test]
    fn inconsistent_tree_is_corrupt() {
        let mut json: Value = serde_json::from_slice(&model_to_json(&small_model()).unwrap()).unwrap();
        json["trees"][1]["leaf_values"].as_array_mut().unwrap().pop();
        let bytes = serde_json::to_vec(&json).unwrap();
        assert!(matches!(model_from_json::<f64>(&bytes), Err(Error::Corrupt(_))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let m = small_model();
        save_model(&m, &path).unwrap();
        assert_eq!(load_model::<f64>(&path).unwrap(), m);
    }

    proptest! {
        #[test]
        fn scalars_round_trip_exactly_f64(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let mut m = GbdtModel::constant(v, Hyperparams::default());
            m.trees.push(ObliviousTree { levels: vec![Level { feature: 3, threshold: v }], leaf_values: vec![v, -v] });
            let back: GbdtModel<f64> = model_from_json(&model_to_json(&m).unwrap()).unwrap();
            prop_assert_eq!(back.base_prediction.to_bits(), v.to_bits());
            prop_assert_eq!(back.trees[0].leaf_values[1].to_bits(), (-v).to_bits());
        }

        #[test]
        fn scalars_round_trip_exactly_f32(bits in any::<u32>()) {
            let v = f32::from_bits(bits);
            prop_assume!(v.is_finite());
            let m = GbdtModel::constant(v, Hyperparams::default());
            let back: GbdtModel<f32> = model_from_json(&model_to_json(&m).unwrap()).unwrap();
            prop_assert_eq!(back.base_prediction.to_bits(), v.to_bits());
        }
    }
}
