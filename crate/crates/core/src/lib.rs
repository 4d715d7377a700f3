//! Turbidity retrieval from Sentinel-2 Level-2A band means.
//!
//! The pipeline matches in-situ turbidity measurements to per-scene band
//! means over a small square around each station, trains gradient-boosted
//! oblivious regression trees on the resulting table and reports
//! MSE/RMSE/MAE on train, validation and test splits.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the bottom of this module fix the scalar for the common cases.

pub mod band;
pub mod builder;
mod csvio;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod fsutil;
pub mod gbdt;
pub mod insitu;
pub mod metrics;
pub mod patch;
pub mod sample;
pub mod scalar;
pub mod split;

pub use band::{canonical_band_index, BandId, BAND_COUNT};
pub use builder::{build_dataset, match_scenes, BuildOutput, MatchPolicy, SceneSelection, Unmatched, UnmatchedReason};
pub use dataset::{Dataset, DatasetRow, FeatureRow};
pub use error::{Error, Result};
pub use evaluation::{emit_series, evaluate, EvaluationReport, SeriesPoint};
pub use gbdt::{find_best_level_split, GbdtModel, Hyperparams, ObliviousTree, SplitChoice};
pub use insitu::{validate_insitu_file, InSituRecord};
pub use metrics::{compute_metrics, Metrics};
pub use patch::{aggregate_patch, PatchGrid};
pub use sample::BandSample;
pub use scalar::Scalar;
pub use split::{split_dataset, SplitSpec, Splits};

pub type InSituRecordF64 = InSituRecord<f64>;
pub type BandSampleF64 = BandSample<f64>;
pub type DatasetF64 = Dataset<f64>;
pub type HyperparamsF64 = Hyperparams<f64>;
pub type GbdtModelF64 = GbdtModel<f64>;
pub type GbdtModelF32 = GbdtModel<f32>;
pub type MetricsF64 = Metrics<f64>;
pub type EvaluationReportF64 = EvaluationReport<f64>;
