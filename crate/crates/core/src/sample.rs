//! Per-scene band means over the sampling square ("band-samples" CSV).

use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::band::{BandId, BAND_COUNT};
use crate::csvio;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::scalar::{parse_scalar, Scalar};

pub const BAND_SAMPLE_FIXED_COLUMNS: [&str; 4] = ["record_id", "scene_id", "scene_datetime", "valid_fraction"];

/// Mean surface reflectance of one scene over one record's square, in the
/// scale the exporter emitted (models are tied to that scale).
#[derive(Debug, Clone, PartialEq)]
pub struct BandSample<T> {
    pub record_id: String,
    pub scene_id: String,
    pub scene_datetime: DateTime<Utc>,
    pub valid_fraction: f64,
    pub bands: [T; BAND_COUNT],
}

impl<T: Scalar> BandSample<T> {
    pub fn band(&self, id: BandId) -> T {
        self.bands[id.index()]
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if !(0.0..=1.0).contains(&self.valid_fraction) {
            return Err(format!("valid_fraction {} not in [0, 1]", self.valid_fraction));
        }
        if let Some(i) = self.bands.iter().position(|v| !v.is_finite()) {
            return Err(format!("band {} is not finite", BandId::ALL[i]));
        }
        Ok(())
    }
}

pub fn band_samples_header() -> Vec<&'static str> {
    BAND_SAMPLE_FIXED_COLUMNS
        .iter()
        .copied()
        .chain(BandId::ALL.iter().map(|b| b.name()))
        .collect()
}

pub(crate) fn parse_datetime(text: &str) -> std::result::Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(text.trim())
        .map(|dt| dt.with_timezone(&Utc))
        .map_err(|e| format!("`{text}`: {e}"))
}

pub(crate) fn format_datetime(dt: &DateTime<Utc>) -> String {
    dt.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

pub fn read_band_samples<T: Scalar>(path: &Path) -> Result<Vec<BandSample<T>>> {
    parse_band_samples(&fsutil::read_to_string(path)?)
}

/// Parses a band-samples CSV. Lines starting with `#` are comments.
pub fn parse_band_samples<T: Scalar>(text: &str) -> Result<Vec<BandSample<T>>> {
    let header = band_samples_header();
    let mut rdr = csvio::reader(text, true);
    csvio::expect_header(&mut rdr, &header)?;

    let mut out = Vec::new();
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
        let scene_id = csvio::field(&row, 1, "scene_id")?.to_string();
        let scene_datetime =
            parse_datetime(csvio::field(&row, 2, "scene_datetime")?).map_err(|m| Error::parse(line, "scene_datetime", m))?;

        let vf_text = csvio::field(&row, 3, "valid_fraction")?;
        let valid_fraction: f64 = vf_text
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, "valid_fraction", format!("`{vf_text}` is not a number")))?;
        if !(0.0..=1.0).contains(&valid_fraction) {
            return Err(Error::range(line, "valid_fraction", format!("{vf_text} not in [0, 1]")));
        }

        let mut bands = [T::zero(); BAND_COUNT];
        for (i, band) in BandId::ALL.iter().enumerate() {
            let text = csvio::field(&row, 4 + i, band.name())?;
            let v: T = parse_scalar(text)
                .ok_or_else(|| Error::parse(line, band.name(), format!("`{text}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::range(line, band.name(), "not finite"));
            }
            bands[i] = v;
        }
        out.push(BandSample {
            record_id,
            scene_id,
            scene_datetime,
            valid_fraction,
            bands,
        });
    }
    Ok(out)
}

pub fn write_band_samples<T: Scalar>(samples: &[BandSample<T>]) -> Result<Vec<u8>> {
    let mut w = csvio::writer();
    csvio::write_row(&mut w, band_samples_header())?;
    for s in samples {
        let mut row = vec![
            s.record_id.clone(),
            s.scene_id.clone(),
            format_datetime(&s.scene_datetime),
            s.valid_fraction.to_string(),
        ];
        row.extend(s.bands.iter().map(|v| v.to_string()));
        csvio::write_row(&mut w, row)?;
    }
    csvio::finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> String {
        band_samples_header().join(",") + "\n"
    }

    #[test]
    fn parses_with_comment_lines() {
        let text = format!(
            "# reflectance: native integer scale (x10000)\n{}r1,S2A_1,2019-06-08T02:55:21Z,1,1,2,3,4,5,6,7,8,9,10,11,12\n",
            header()
        );
        let s = parse_band_samples::<f64>(&text).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].band(BandId::B8A), 9.0);
        assert_eq!(s[0].band(BandId::B12), 12.0);
        assert_eq!(format_datetime(&s[0].scene_datetime), "2019-06-08T02:55:21Z");
    }

    #[test]
    fn offsets_are_normalized_to_utc() {
        let dt = parse_datetime("2019-06-08T10:55:21+08:00").unwrap();
        assert_eq!(format_datetime(&dt), "2019-06-08T02:55:21Z");
    }

    #[test]
    fn rejects_bad_values() {
        let bad_vf = format!("{}r1,s,2019-06-08T00:00:00Z,1.5,1,2,3,4,5,6,7,8,9,10,11,12\n", header());
        assert!(matches!(
            parse_band_samples::<f64>(&bad_vf).unwrap_err(),
            Error::Range { line: 2, ref field, .. } if field == "valid_fraction"
        ));
        let nan = format!("{}r1,s,2019-06-08T00:00:00Z,1,1,2,3,4,5,6,7,8,NaN,10,11,12\n", header());
        assert!(matches!(
            parse_band_samples::<f64>(&nan).unwrap_err(),
            Error::Range { ref field, .. } if field == "B8A"
        ));
        let no_tz = format!("{}r1,s,2019-06-08T00:00:00,1,1,2,3,4,5,6,7,8,9,10,11,12\n", header());
        assert!(parse_band_samples::<f64>(&no_tz).is_err());
    }

    #[test]
    fn header_with_b10_is_rejected() {
        let text = "record_id,scene_id,scene_datetime,valid_fraction,B1,B2,B3,B4,B5,B6,B7,B8,B8A,B9,B10,B12\n";
        assert!(matches!(parse_band_samples::<f64>(text).unwrap_err(), Error::Header { .. }));
    }

    #[test]
    fn canonical_round_trip() {
        let text = format!(
            "{}r1,S2B_x,2019-06-08T02:55:21Z,0.75,1,2.5,3,4,5,6,7,8,9,10,11,0.125\n",
            header()
        );
        let s = parse_band_samples::<f64>(&text).unwrap();
        assert_eq!(String::from_utf8(write_band_samples(&s).unwrap()).unwrap(), text);
    }
}
