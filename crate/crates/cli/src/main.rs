//! `aquaboost` command-line pipeline: build-dataset → train → predict.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 runtime or
//! degenerate-data error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use aquaboost::builder::write_unmatched;
use aquaboost::dataset::{read_dataset, read_features, write_dataset};
use aquaboost::evaluation::report_to_json;
use aquaboost::fsutil::write_atomic;
use aquaboost::gbdt::{load_model, model_to_json, Loss};
use aquaboost::patch::read_patches;
use aquaboost::sample::read_band_samples;
use aquaboost::{
    aggregate_patch, build_dataset, emit_series, evaluate, split_dataset, validate_insitu_file, GbdtModel, Hyperparams,
    MatchPolicy, SceneSelection, SplitSpec,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aquaboost", version, about = "Turbidity regression from Sentinel-2 Level-2A band means")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Match in-situ records to band samples and write the training table.
    BuildDataset(BuildArgs),
    /// Split a dataset, train a model and write the evaluation report.
    Train(TrainArgs),
    /// Predict turbidity for rows of band features.
    Predict(PredictArgs),
    /// Check input files against their schemas.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    insitu: PathBuf,
    /// Band-samples CSV (one row per record and scene).
    #[arg(long, required_unless_present = "patches")]
    bands: Option<PathBuf>,
    /// Raw per-pixel patches, aggregated locally and added to the samples.
    #[arg(long)]
    patches: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    window_days: u32,
    #[arg(long, default_value_t = 0.5)]
    min_valid_fraction: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    unmatched_out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 600)]
    iterations: usize,
    #[arg(long, default_value_t = 0.6)]
    learning_rate: f64,
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, default_value_t = 1.0)]
    l2_leaf_reg: f64,
    #[arg(long, env = "AQUABOOST_SEED", default_value_t = 0)]
    seed: u64,
    /// Train, test and validation fractions.
    #[arg(long, default_value = "0.55,0.20,0.25")]
    split: String,
    #[arg(long)]
    model_out: PathBuf,
    /// Report JSON; the per-split series go next to it as
    /// `<stem>_train.csv`, `<stem>_validation.csv`, `<stem>_test.csv`.
    #[arg(long)]
    report_out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    insitu: Option<PathBuf>,
    #[arg(long)]
    bands: Option<PathBuf>,
    #[arg(long)]
    patches: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

type CmdResult = Result<(), Failure>;

/// Classifies a library error by its kind.
fn lib(context: impl std::fmt::Display) -> impl FnOnce(aquaboost::Error) -> Failure {
    move |e| {
        let code = if e.is_input_error() { 2 } else { 3 };
        let error = match e {
            // Already names its path.
            aquaboost::Error::Io { .. } => anyhow::Error::new(e),
            _ => anyhow::Error::new(e).context(context.to_string()),
        };
        Failure { code, error }
    }
}

fn input(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn runtime(error: anyhow::Error) -> Failure {
    Failure { code: 3, error }
}

fn write_output(path: &Path, bytes: &[u8]) -> CmdResult {
    write_atomic(path, bytes)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(runtime)
}

fn build(args: BuildArgs) -> CmdResult {
    let policy = MatchPolicy {
        window_days: args.window_days,
        min_valid_fraction: args.min_valid_fraction,
        scene_selection: SceneSelection::NearestInTime,
    };
    policy.validate().map_err(lib("--min-valid-fraction"))?;

    let records = validate_insitu_file::<f64>(&args.insitu).map_err(lib(args.insitu.display()))?;
    let mut samples = match &args.bands {
        Some(path) => read_band_samples::<f64>(path).map_err(lib(path.display()))?,
        None => Vec::new(),
    };
    if let Some(path) = &args.patches {
        for patch in read_patches::<f64>(path).map_err(lib(path.display()))? {
            samples.push(aggregate_patch(&patch).map_err(lib(path.display()))?);
        }
    }

    let mut out = build_dataset(&records, &samples, &policy).map_err(lib("building dataset"))?;
    out.dataset
        .provenance
        .push(format!("in-situ: {}", args.insitu.display()));
    let dataset = write_dataset(&out.dataset).map_err(lib("encoding dataset"))?;
    let unmatched = write_unmatched(&out.unmatched).map_err(lib("encoding unmatched list"))?;
    write_output(&args.out, &dataset)?;
    write_output(&args.unmatched_out, &unmatched)?;

    println!(
        "records: {}  samples: {}  rows: {}  unmatched: {}",
        records.len(),
        samples.len(),
        out.dataset.len(),
        out.unmatched.len()
    );
    for note in &out.dataset.provenance {
        eprintln!("provenance: {note}");
    }
    Ok(())
}

fn parse_split(text: &str, seed: u64) -> anyhow::Result<SplitSpec> {
    let parts = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("`{p}` is not a number")))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    let [train, test, val] = parts[..] else {
        return Err(anyhow!("expected three comma-separated fractions, got {}", parts.len()));
    };
    if [train, test, val].iter().any(|f| *f <= 0.0) {
        return Err(anyhow!("every split must be nonempty; fractions {text} contain a zero"));
    }
    Ok(SplitSpec::new(train, test, val, seed)?)
}

fn train(args: TrainArgs) -> CmdResult {
    let hp = Hyperparams {
        iterations: args.iterations,
        learning_rate: args.learning_rate,
        depth: args.depth,
        l2_leaf_reg: args.l2_leaf_reg,
        loss: Loss::Rmse,
        seed: args.seed,
    };
    hp.validate().map_err(lib("hyperparameters"))?;
    let spec = parse_split(&args.split, args.seed)
        .context("--split")
        .map_err(input)?;

    let ds = read_dataset::<f64>(&args.dataset).map_err(lib(args.dataset.display()))?;
    let splits = split_dataset(&ds, &spec).map_err(lib("splitting dataset"))?;
    let model = GbdtModel::fit(&splits.train, &hp).map_err(lib("training"))?;
    let mut report = evaluate(&model, &splits).map_err(lib("evaluating"))?;

    let prefix = args.report_out.with_extension("");
    let model_bytes = model_to_json(&model).map_err(lib("encoding model"))?;
    report.series_paths = Some(emit_series(&report, &prefix).map_err(|e| runtime(e.into()))?);
    let report_bytes = report_to_json(&report).map_err(lib("encoding report"))?;
    write_output(&args.model_out, &model_bytes)?;
    write_output(&args.report_out, &report_bytes)?;

    println!(
        "rows: {}  train: {}  test: {}  validation: {}",
        ds.len(),
        splits.train.len(),
        splits.test.len(),
        splits.validation.len()
    );
    println!("dataset mean: {:.4} NTU", report.dataset_mean_ntu);
    println!("{:<12}{:>14}{:>14}{:>14}", "split", "MSE", "RMSE", "MAE");
    for (name, split) in [("train", &report.train), ("validation", &report.validation), ("test", &report.test)] {
        let m = &split.metrics;
        println!("{name:<12}{:>14.7}{:>14.7}{:>14.7}", m.mse, m.rmse(), m.mae);
    }
    Ok(())
}

fn predict(args: PredictArgs) -> CmdResult {
    let model = load_model::<f64>(&args.model).map_err(lib(args.model.display()))?;
    let rows = read_features::<f64>(&args.features).map_err(lib(args.features.display()))?;
    let mut out = String::from("record_id,predicted_turbidity_ntu\n");
    for row in &rows {
        let p = model.predict(&row.features).map_err(lib(&row.record_id))?;
        let id = if row.record_id.contains([',', '"', '\n']) {
            format!("\"{}\"", row.record_id.replace('"', "\"\""))
        } else {
            row.record_id.clone()
        };
        let _ = writeln!(out, "{id},{p}");
    }
    write_output(&args.out, out.as_bytes())?;
    println!("predictions: {}", rows.len());
    Ok(())
}

fn validate(args: ValidateArgs) -> CmdResult {
    let mut checked = 0;
    if let Some(path) = &args.insitu {
        let n = validate_insitu_file::<f64>(path).map_err(lib(path.display()))?.len();
        println!("{}: ok, {n} in-situ records", path.display());
        checked += 1;
    }
    if let Some(path) = &args.bands {
        let samples = read_band_samples::<f64>(path).map_err(lib(path.display()))?;
        println!("{}: ok, {} band samples", path.display(), samples.len());
        checked += 1;
    }
    if let Some(path) = &args.patches {
        let n = read_patches::<f64>(path).map_err(lib(path.display()))?.len();
        println!("{}: ok, {n} patches", path.display());
        checked += 1;
    }
    if let Some(path) = &args.dataset {
        let n = read_dataset::<f64>(path).map_err(lib(path.display()))?.len();
        println!("{}: ok, {n} rows", path.display());
        checked += 1;
    }
    if checked == 0 {
        return Err(input(anyhow!("nothing to validate; pass --insitu, --bands, --patches or --dataset")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildDataset(a) => build(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
