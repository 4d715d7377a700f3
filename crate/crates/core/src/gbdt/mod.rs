//! Gradient-boosted oblivious regression trees.

mod boost;
mod params;
mod persist;
mod search;
mod tree;

pub use boost::{fit_detailed, FitOutcome, GbdtModel};
pub use params::{Hyperparams, Loss, MAX_DEPTH};
pub use persist::{load_model, model_from_json, model_to_json, save_model, MODEL_FORMAT_VERSION};
pub use search::{find_best_level_split, leaf_value, residuals, FeatureMatrix, SplitChoice};
pub use tree::{Level, ObliviousTree};
