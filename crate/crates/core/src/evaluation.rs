//! Per-split evaluation reports and expected-vs-predicted series.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::band::BandId;
use crate::csvio;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::gbdt::{GbdtModel, Hyperparams};
use crate::metrics::{compute_metrics, Metrics};
use crate::scalar::{parse_scalar, Scalar};
use crate::split::Splits;
use crate::dataset::Dataset;

pub const SERIES_HEADER: [&str; 4] = ["index", "record_id", "expected_ntu", "predicted_ntu"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoint<T> {
    pub record_id: String,
    pub expected: T,
    pub predicted: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitEvaluation<T> {
    pub metrics: Metrics<T>,
    /// Rows in split-internal order.
    pub series: Vec<SeriesPoint<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPaths {
    pub train: PathBuf,
    pub validation: PathBuf,
    pub test: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport<T> {
    /// Mean target over all three splits pooled.
    pub dataset_mean_ntu: T,
    pub train: SplitEvaluation<T>,
    pub validation: SplitEvaluation<T>,
    pub test: SplitEvaluation<T>,
    pub hyperparams: Hyperparams<T>,
    pub series_paths: Option<SeriesPaths>,
}

fn evaluate_split<T: Scalar>(model: &GbdtModel<T>, ds: &Dataset<T>) -> Result<SplitEvaluation<T>> {
    let mut series = Vec::with_capacity(ds.len());
    for row in &ds.rows {
        series.push(SeriesPoint {
            record_id: row.record_id.clone(),
            expected: row.target,
            predicted: model.predict(&row.features)?,
        });
    }
    let expected: Vec<T> = series.iter().map(|p| p.expected).collect();
    let predicted: Vec<T> = series.iter().map(|p| p.predicted).collect();
    Ok(SplitEvaluation {
        metrics: compute_metrics(&expected, &predicted)?,
        series,
    })
}

pub fn evaluate<T: Scalar>(model: &GbdtModel<T>, splits: &Splits<T>) -> Result<EvaluationReport<T>> {
    if model.band_schema.as_slice() != BandId::ALL.as_slice() {
        return Err(Error::Schema(format!(
            "model bands {:?} differ from dataset bands {:?}",
            model.band_schema,
            BandId::ALL
        )));
    }
    let train = evaluate_split(model, &splits.train)?;
    let validation = evaluate_split(model, &splits.validation)?;
    let test = evaluate_split(model, &splits.test)?;

    let total: T = [&splits.train, &splits.validation, &splits.test]
        .iter()
        .flat_map(|d| d.rows.iter().map(|r| r.target))
        .sum();
    Ok(EvaluationReport {
        dataset_mean_ntu: total / T::from_count(splits.total_len()),
        train,
        validation,
        test,
        hyperparams: model.hyperparams.clone(),
        series_paths: None,
    })
}

#[derive(Serialize)]
struct SplitsJson<'a, T: Scalar> {
    train: &'a Metrics<T>,
    validation: &'a Metrics<T>,
    test: &'a Metrics<T>,
}

#[derive(Serialize)]
struct ReportJson<'a, T: Scalar> {
    dataset_mean_ntu: T,
    splits: SplitsJson<'a, T>,
    hyperparams: &'a Hyperparams<T>,
    series_paths: &'a Option<SeriesPaths>,
}

pub fn report_to_json<T: Scalar>(report: &EvaluationReport<T>) -> Result<Vec<u8>> {
    let json = ReportJson {
        dataset_mean_ntu: report.dataset_mean_ntu,
        splits: SplitsJson {
            train: &report.train.metrics,
            validation: &report.validation.metrics,
            test: &report.test.metrics,
        },
        hyperparams: &report.hyperparams,
        series_paths: &report.series_paths,
    };
    let mut bytes = serde_json::to_vec_pretty(&json)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_series<T: Scalar>(series: &[SeriesPoint<T>]) -> Result<Vec<u8>> {
    let mut w = csvio::writer();
    csvio::write_row(&mut w, SERIES_HEADER)?;
    for (i, p) in series.iter().enumerate() {
        csvio::write_row(
            &mut w,
            [
                i.to_string(),
                p.record_id.clone(),
                p.expected.to_string(),
                p.predicted.to_string(),
            ],
        )?;
    }
    csvio::finish(w)
}

/// Writes `<prefix>_train.csv`, `<prefix>_validation.csv` and
/// `<prefix>_test.csv`.
pub fn emit_series<T: Scalar>(report: &EvaluationReport<T>, prefix: &Path) -> Result<SeriesPaths> {
    let with_suffix = |suffix: &str| {
        let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(format!("_{suffix}.csv"));
        prefix.with_file_name(name)
    };
    let paths = SeriesPaths {
        train: with_suffix("train"),
        validation: with_suffix("validation"),
        test: with_suffix("test"),
    };
    for (path, split) in [
        (&paths.train, &report.train),
        (&paths.validation, &report.validation),
        (&paths.test, &report.test),
    ] {
        fsutil::write_atomic(path, &write_series(&split.series)?)?;
    }
    Ok(paths)
}

pub fn parse_series<T: Scalar>(text: &str) -> Result<Vec<SeriesPoint<T>>> {
    let mut rdr = csvio::reader(text, false);
    csvio::expect_header(&mut rdr, &SERIES_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csvio::csv_error)?;
        let line = csvio::line_of(&row);
        let index: usize = csvio::field(&row, 0, "index")?
            .parse()
            .map_err(|_| Error::parse(line, "index", "not an integer"))?;
        if index != out.len() {
            return Err(Error::parse(line, "index", format!("expected {}", out.len())));
        }
        let num = |i: usize, name: &str| -> Result<T> {
            let text = csvio::field(&row, i, name)?;
            parse_scalar(text).ok_or_else(|| Error::parse(line, name, format!("`{text}` is not a number")))
        };
        out.push(SeriesPoint {
            record_id: csvio::field(&row, 1, "record_id")?.to_string(),
            expected: num(2, "expected_ntu")?,
            predicted: num(3, "predicted_ntu")?,
        });
    }
    Ok(out)
}

pub fn read_series<T: Scalar>(path: &Path) -> Result<Vec<SeriesPoint<T>>> {
    parse_series(&fsutil::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::BAND_COUNT;
    use crate::dataset::DatasetRow;

    fn ds(targets: &[f64], tag: &str) -> Dataset<f64> {
        let rows = targets
            .iter()
            .enumerate()
            .map(|(i, t)| DatasetRow {
                record_id: format!("{tag}{i}"),
                features: [i as f64; BAND_COUNT],
                target: *t,
            })
            .collect();
        Dataset::new(rows, vec![]).unwrap()
    }

    fn population_variance(v: &[f64]) -> f64 {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
    }

    #[test]
    fn mean_model_mse_is_split_variance() {
        let (tr, te, va) = ([1.0, 2.0, 6.0], [0.0, 3.0, 6.0], [4.0, 4.0, 1.0]);
        let splits = Splits {
            train: ds(&tr, "a"),
            test: ds(&te, "b"),
            validation: ds(&va, "c"),
        };
        // Mean of each split equals 3 here, as does the pooled mean.
        let model = GbdtModel::constant(3.0, Hyperparams::default());
        let r = evaluate(&model, &splits).unwrap();
        assert_eq!(r.dataset_mean_ntu, 3.0);
        assert!((r.train.metrics.mse - population_variance(&tr)).abs() < 1e-12);
        assert!((r.test.metrics.mse - population_variance(&te)).abs() < 1e-12);
        assert!((r.validation.metrics.mse - population_variance(&va)).abs() < 1e-12);
        assert_eq!(r.train.series.len(), 3);
    }

    #[test]
    fn single_row_splits() {
        let splits = Splits {
            train: ds(&[5.0], "a"),
            test: ds(&[1.0], "b"),
            validation: ds(&[2.5], "c"),
        };
        let model = GbdtModel::constant(2.0, Hyperparams::default());
        let r = evaluate(&model, &splits).unwrap();
        assert_eq!(r.train.metrics.rmse(), 3.0);
        assert_eq!(r.test.metrics.rmse(), 1.0);
        assert_eq!(r.validation.metrics.rmse(), 0.5);
        assert_eq!(evaluate(&model, &splits).unwrap(), r);
    }

    #[test]
    fn schema_mismatch() {
        let splits = Splits {
            train: ds(&[5.0], "a"),
            test: ds(&[1.0], "b"),
            validation: ds(&[2.5], "c"),
        };
        let mut model = GbdtModel::constant(2.0, Hyperparams::default());
        model.band_schema.pop();
        assert!(matches!(evaluate(&model, &splits), Err(Error::Schema(_))));
    }

    #[test]
    fn series_files_round_trip() {
        let splits = Splits {
            train: ds(&[5.0, 0.1, 7.25], "a"),
            test: ds(&[1.0, 2.0], "b"),
            validation: ds(&[2.5], "c"),
        };
        let model = GbdtModel::constant(1.0 / 3.0, Hyperparams::default());
        let mut r = evaluate(&model, &splits).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_series(&r, &dir.path().join("report")).unwrap();
        assert!(paths.test.ends_with("report_test.csv"));
        let text = std::fs::read_to_string(&paths.test).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(read_series::<f64>(&paths.train).unwrap(), r.train.series);
        assert_eq!(read_series::<f64>(&paths.validation).unwrap(), r.validation.series);

        r.series_paths = Some(paths);
        let json: serde_json::Value = serde_json::from_slice(&report_to_json(&r).unwrap()).unwrap();
        assert_eq!(json["splits"]["test"]["n"], 2);
        assert_eq!(json["hyperparams"]["iterations"], 600);
        assert!(json["series_paths"]["train"].is_string());
    }
}
