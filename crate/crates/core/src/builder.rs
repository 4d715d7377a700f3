//! Matching in-situ records to scene band means and assembling the dataset.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::csvio;
use crate::dataset::{Dataset, DatasetRow};
use crate::error::{Error, Result};
use crate::insitu::InSituRecord;
use crate::sample::BandSample;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SceneSelection {
    /// Smallest whole-day distance to the in-situ date; ties go to the
    /// earlier acquisition.
    #[default]
    NearestInTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchPolicy {
    /// Half-width of the inclusive date window, in days.
    pub window_days: u32,
    pub min_valid_fraction: f64,
    pub scene_selection: SceneSelection,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        MatchPolicy {
            window_days: 3,
            min_valid_fraction: 0.5,
            scene_selection: SceneSelection::NearestInTime,
        }
    }
}

impl MatchPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.min_valid_fraction) {
            return Err(Error::InvalidHyperparams(format!(
                "min_valid_fraction {} not in [0, 1]",
                self.min_valid_fraction
            )));
        }
        Ok(())
    }
}

/// Signed whole-day offset of the scene's UTC date from the record date.
fn day_offset<T>(record: &InSituRecord<T>, sample: &BandSample<T>) -> i64 {
    (sample.scene_datetime.date_naive() - record.date).num_days()
}

/// Picks the scene for one record, or `None` when no scene passes both the
/// date window and the valid-fraction gate.
///
/// Samples are expected to belong to `record`; others are ignored.
pub fn match_scenes<'a, T: Scalar>(
    record: &InSituRecord<T>,
    samples: &'a [BandSample<T>],
    policy: &MatchPolicy,
) -> Option<&'a BandSample<T>> {
    let window = i64::from(policy.window_days);
    samples
        .iter()
        .filter(|s| s.record_id == record.record_id)
        .filter(|s| day_offset(record, s).abs() <= window)
        .filter(|s| s.valid_fraction >= policy.min_valid_fraction)
        .min_by(|a, b| match policy.scene_selection {
            SceneSelection::NearestInTime => day_offset(record, a)
                .abs()
                .cmp(&day_offset(record, b).abs())
                .then(a.scene_datetime.cmp(&b.scene_datetime))
                .then_with(|| a.scene_id.cmp(&b.scene_id)),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnmatchedReason {
    /// No band sample carries this record's id.
    NoSamples,
    /// Samples exist but none falls inside the date window.
    OutsideWindow,
    /// In-window scenes exist but all fail the valid-fraction gate.
    LowValidFraction,
}

impl UnmatchedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UnmatchedReason::NoSamples => "no_samples",
            UnmatchedReason::OutsideWindow => "outside_window",
            UnmatchedReason::LowValidFraction => "low_valid_fraction",
        }
    }
}

impl fmt::Display for UnmatchedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unmatched {
    pub record_id: String,
    pub reason: UnmatchedReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildOutput<T> {
    pub dataset: Dataset<T>,
    pub unmatched: Vec<Unmatched>,
}

/// Builds one dataset row per record with a qualifying scene. Rows and the
/// unmatched list are both sorted by `record_id`.
pub fn build_dataset<T: Scalar>(
    records: &[InSituRecord<T>],
    samples: &[BandSample<T>],
    policy: &MatchPolicy,
) -> Result<BuildOutput<T>> {
    policy.validate()?;

    let mut seen = HashSet::with_capacity(samples.len());
    let mut by_record: HashMap<&str, Vec<BandSample<T>>> = HashMap::new();
    for s in samples {
        if !seen.insert((s.record_id.as_str(), s.scene_id.as_str())) {
            return Err(Error::DuplicateSample {
                record_id: s.record_id.clone(),
                scene_id: s.scene_id.clone(),
            });
        }
        if let Err(message) = s.check() {
            return Err(Error::Schema(format!(
                "sample for record `{}` scene `{}`: {message}",
                s.record_id, s.scene_id
            )));
        }
        by_record.entry(s.record_id.as_str()).or_default().push(s.clone());
    }

    let mut rows = Vec::new();
    let mut unmatched = Vec::new();
    for record in records {
        let candidates = by_record.get(record.record_id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        match match_scenes(record, candidates, policy) {
            Some(sample) => rows.push(DatasetRow {
                record_id: record.record_id.clone(),
                features: sample.bands,
                target: record.turbidity,
            }),
            None => {
                let reason = if candidates.is_empty() {
                    UnmatchedReason::NoSamples
                } else if candidates
                    .iter()
                    .any(|s| day_offset(record, s).abs() <= i64::from(policy.window_days))
                {
                    UnmatchedReason::LowValidFraction
                } else {
                    UnmatchedReason::OutsideWindow
                };
                unmatched.push(Unmatched {
                    record_id: record.record_id.clone(),
                    reason,
                });
            }
        }
    }
    rows.sort_by(|a, b| a.record_id.cmp(&b.record_id));
    unmatched.sort_by(|a, b| a.record_id.cmp(&b.record_id));

    let provenance = vec![format!(
        "matched {} of {} records; window ±{} days; min_valid_fraction {}; selection nearest_in_time",
        rows.len(),
        records.len(),
        policy.window_days,
        policy.min_valid_fraction
    )];
    Ok(BuildOutput {
        dataset: Dataset::new(rows, provenance)?,
        unmatched,
    })
}

pub fn write_unmatched(unmatched: &[Unmatched]) -> Result<Vec<u8>> {
    let mut w = csvio::writer();
    csvio::write_row(&mut w, ["record_id", "reason"])?;
    for u in unmatched {
        csvio::write_row(&mut w, [u.record_id.as_str(), u.reason.as_str()])?;
    }
    csvio::finish(w)
}
