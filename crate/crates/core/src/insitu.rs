//! Ground-truth turbidity measurements and their CSV form.

use std::collections::HashSet;
use std::path::Path;

use chrono::NaiveDate;

use crate::csvio;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::scalar::{parse_scalar, Scalar};

pub const INSITU_HEADER: [&str; 6] = ["record_id", "station_id", "lat", "lon", "date", "turbidity_ntu"];

const DATE_FORMAT: &str = "%Y-%m-%d";

/// One in-situ turbidity measurement (NTU) at a monitoring station on a UTC
/// civil date.
#[derive(Debug, Clone, PartialEq)]
pub struct InSituRecord<T> {
    pub record_id: String,
    pub station_id: String,
    pub lat: f64,
    pub lon: f64,
    pub date: NaiveDate,
    pub turbidity: T,
}

pub fn validate_insitu_file<T: Scalar>(path: &Path) -> Result<Vec<InSituRecord<T>>> {
    parse_insitu(&fsutil::read_to_string(path)?)
}

/// Parses an in-situ CSV, preserving file order.
pub fn parse_insitu<T: Scalar>(text: &str) -> Result<Vec<InSituRecord<T>>> {
    let mut rdr = csvio::reader(text, false);
    csvio::expect_header(&mut rdr, &INSITU_HEADER)?;

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csvio::csv_error)?;
        let line = csvio::line_of(&row);
        if row.len() != INSITU_HEADER.len() {
            return Err(Error::parse(
                line,
                "<row>",
                format!("expected {} fields, found {}", INSITU_HEADER.len(), row.len()),
            ));
        }

        let record_id = csvio::field(&row, 0, "record_id")?.to_string();
        if record_id.is_empty() {
            return Err(Error::parse(line, "record_id", "empty identifier"));
        }
        let station_id = csvio::field(&row, 1, "station_id")?.to_string();

        let lat = parse_f64(&row, 2, "lat")?;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::range(line, "lat", format!("{lat} not in [-90, 90]")));
        }
        let lon = parse_f64(&row, 3, "lon")?;
        if !(-180.0..=180.0).contains(&lon) {
            return Err(Error::range(line, "lon", format!("{lon} not in [-180, 180]")));
        }

        let date_text = csvio::field(&row, 4, "date")?;
        let date = NaiveDate::parse_from_str(date_text, DATE_FORMAT)
            .map_err(|e| Error::parse(line, "date", format!("`{date_text}`: {e}")))?;

        let turb_text = csvio::field(&row, 5, "turbidity_ntu")?;
        let turbidity: T = parse_scalar(turb_text)
            .ok_or_else(|| Error::parse(line, "turbidity_ntu", format!("`{turb_text}` is not a number")))?;
        if !turbidity.is_finite() || turbidity < T::zero() {
            return Err(Error::range(
                line,
                "turbidity_ntu",
                format!("{turb_text} must be finite and nonnegative"),
            ));
        }

        if !seen.insert(record_id.clone()) {
            return Err(Error::DuplicateRecord { line, record_id });
        }
        out.push(InSituRecord {
            record_id,
            station_id,
            lat,
            lon,
            date,
            turbidity,
        });
    }
    Ok(out)
}

fn parse_f64(row: &csv::StringRecord, index: usize, name: &str) -> Result<f64> {
    let text = csvio::field(row, index, name)?;
    let line = csvio::line_of(row);
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, name, format!("`{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::range(line, name, "not finite"));
    }
    Ok(v)
}

/// Serializes records in canonical form (shortest round-trip numbers).
pub fn write_insitu<T: Scalar>(records: &[InSituRecord<T>]) -> Result<Vec<u8>> {
    let mut w = csvio::writer();
    csvio::write_row(&mut w, INSITU_HEADER)?;
    for r in records {
        csvio::write_row(
            &mut w,
            [
                r.record_id.clone(),
                r.station_id.clone(),
                r.lat.to_string(),
                r.lon.to_string(),
                r.date.format(DATE_FORMAT).to_string(),
                r.turbidity.to_string(),
            ],
        )?;
    }
    csvio::finish(w)
}
