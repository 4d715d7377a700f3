//! The tabular training set: 12 band features plus the turbidity target.

use std::collections::HashSet;
use std::path::Path;

use crate::band::{BandId, BAND_COUNT};
use crate::csvio;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::scalar::{parse_scalar, Scalar};

pub const TARGET_COLUMN: &str = "turbidity_ntu";

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow<T> {
    pub record_id: String,
    pub features: [T; BAND_COUNT],
    pub target: T,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset<T> {
    pub rows: Vec<DatasetRow<T>>,
    /// Free-form notes on where the rows came from (input paths, matching
    /// parameters). Not part of the CSV form.
    pub provenance: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    /// Validates the row invariants: unique ids, finite features, finite
    /// nonnegative targets.
    pub fn new(rows: Vec<DatasetRow<T>>, provenance: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(rows.len());
        for row in &rows {
            if !seen.insert(row.record_id.as_str()) {
                return Err(Error::Schema(format!("duplicate record_id `{}` in dataset", row.record_id)));
            }
            if let Some(i) = row.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "feature {} of record `{}`",
                    BandId::ALL[i],
                    row.record_id
                )));
            }
            if !row.target.is_finite() || row.target < T::zero() {
                return Err(Error::NonFinite(format!(
                    "target of record `{}` must be finite and nonnegative",
                    row.record_id
                )));
            }
        }
        Ok(Dataset { rows, provenance })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn schema(&self) -> &'static [BandId; BAND_COUNT] {
        &BandId::ALL
    }

    pub fn targets(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.target).collect()
    }

    pub fn feature_rows(&self) -> Vec<[T; BAND_COUNT]> {
        self.rows.iter().map(|r| r.features).collect()
    }

    pub fn mean_target(&self) -> Option<T> {
        if self.rows.is_empty() {
            return None;
        }
        let sum: T = self.rows.iter().map(|r| r.target).sum();
        Some(sum / T::from_count(self.rows.len()))
    }
}

pub fn dataset_header() -> Vec<&'static str> {
    std::iter::once("record_id")
        .chain(BandId::ALL.iter().map(|b| b.name()))
        .chain(std::iter::once(TARGET_COLUMN))
        .collect()
}

pub fn read_dataset<T: Scalar>(path: &Path) -> Result<Dataset<T>> {
    let mut ds = parse_dataset(&fsutil::read_to_string(path)?)?;
    ds.provenance.push(format!("loaded from {}", path.display()));
    Ok(ds)
}

pub fn parse_dataset<T: Scalar>(text: &str) -> Result<Dataset<T>> {
    let header = dataset_header();
    let mut rdr = csvio::reader(text, false);
    csvio::expect_header(&mut rdr, &header)?;

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for row in rdr.records() {
        let row = row.map_err(csvio::csv_error)?;
        let line = csvio::line_of(&row);
        if row.len() != header.len() {
            return Err(Error::parse(
                line,
                "<row>",
                format!("expected {} fields, found {}", header.len(), row.len()),
            ));
        }
        let record_id = csvio::field(&row, 0, "record_id")?.to_string();
        if !seen.insert(record_id.clone()) {
            return Err(Error::DuplicateRecord { line, record_id });
        }
        let mut features = [T::zero(); BAND_COUNT];
        for (i, band) in BandId::ALL.iter().enumerate() {
            features[i] = parse_finite(&row, 1 + i, band.name())?;
        }
        let target = parse_finite(&row, 1 + BAND_COUNT, TARGET_COLUMN)?;
        if target < T::zero() {
            return Err(Error::range(line, TARGET_COLUMN, "negative turbidity"));
        }
        rows.push(DatasetRow {
            record_id,
            features,
            target,
        });
    }
    Dataset::new(rows, Vec::new())
}

fn parse_finite<T: Scalar>(row: &csv::StringRecord, index: usize, name: &str) -> Result<T> {
    let line = csvio::line_of(row);
    let text = csvio::field(row, index, name)?;
    let v: T = parse_scalar(text).ok_or_else(|| Error::parse(line, name, format!("`{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::range(line, name, "not finite"));
    }
    Ok(v)
}

pub fn write_dataset<T: Scalar>(ds: &Dataset<T>) -> Result<Vec<u8>> {
    let mut w = csvio::writer();
    csvio::write_row(&mut w, dataset_header())?;
    for r in &ds.rows {
        let mut fields = Vec::with_capacity(BAND_COUNT + 2);
        fields.push(r.record_id.clone());
        fields.extend(r.features.iter().map(|v| v.to_string()));
        fields.push(r.target.to_string());
        csvio::write_row(&mut w, fields)?;
    }
    csvio::finish(w)
}

/// A feature-only row for prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow<T> {
    pub record_id: String,
    pub features: [T; BAND_COUNT],
}

pub fn read_features<T: Scalar>(path: &Path) -> Result<Vec<FeatureRow<T>>> {
    parse_features(&fsutil::read_to_string(path)?)
}

/// Reads `record_id` and the 12 band columns by name; column order is free
/// and extra columns (e.g. a target) are ignored.
pub fn parse_features<T: Scalar>(text: &str) -> Result<Vec<FeatureRow<T>>> {
    let mut rdr = csvio::reader(text, true);
    let headers = rdr.headers().map_err(csvio::csv_error)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let id_col = find("record_id")?;
    let band_cols = BandId::ALL
        .iter()
        .map(|b| find(b.name()))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csvio::csv_error)?;
        let record_id = csvio::field(&row, id_col, "record_id")?.to_string();
        let mut features = [T::zero(); BAND_COUNT];
        for (i, col) in band_cols.iter().enumerate() {
            features[i] = parse_finite(&row, *col, BandId::ALL[i].name())?;
        }
        out.push(FeatureRow { record_id, features });
    }
    Ok(out)
}
