use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;

use trinet::data::{stratified_split, Condition, Dataset, SplitRatios};
use trinet::nn::{Checkpoint, ModelConfig};
use trinet::text::EmbeddingTable;
use trinet::train::{train, ClassWeightMode, TrainConfig};

use crate::output::OutputSet;

#[derive(Parser)]
pub struct Args {
    /// Input dataset (NDJSON).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub condition: Condition,
    /// Directory receiving model.json, encoder.json, curve.csv and the
    /// run manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Seed driving the split, SMOTE, initialization and dropout.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub weight_decay: f64,
    /// Skip SMOTE augmentation of the training split.
    #[arg(long, default_value_t = false)]
    pub no_smote: bool,
    #[arg(long, default_value_t = 1.0)]
    pub smote_ratio: f64,
    #[arg(long, default_value_t = 15)]
    pub smote_k: usize,
    /// Class weighting: "ratio", "none", or explicit "WPOS:WNEG".
    #[arg(long, default_value = "ratio")]
    pub class_weights: String,
    /// Early-stopping patience in epochs (off when absent).
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long, default_value_t = 48)]
    pub note_length: usize,
    #[arg(long, default_value_t = 16)]
    pub embed_dim: usize,
    /// Optional pretrained word vectors (text format: header "V d", then
    /// one "token v1 .. vd" line per token). Tokens not found here get
    /// deterministic synthetic vectors.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
}

fn parse_class_weights(spec: &str) -> Result<ClassWeightMode> {
    match spec {
        "ratio" => Ok(ClassWeightMode::Ratio),
        "none" => Ok(ClassWeightMode::None),
        other => {
            let Some((pos, neg)) = other.split_once(':') else {
                bail!("class weights must be `ratio`, `none`, or `WPOS:WNEG`, got {other:?}");
            };
            let w_pos: f64 = pos.parse().context("bad positive class weight")?;
            let w_neg: f64 = neg.parse().context("bad negative class weight")?;
            Ok(ClassWeightMode::Explicit { w_pos, w_neg })
        }
    }
}

pub fn run(args: Args) -> Result<()> {
    let mut out = OutputSet::new("train");
    out.input(&args.data)?;
    if let Some(path) = &args.embeddings {
        out.input(path)?;
    }

    let dataset = Dataset::read_ndjson_path(&args.data, args.condition)?;
    let (train_ds, val_ds, _test_ds) =
        stratified_split(&dataset, SplitRatios::default(), args.seed)?;

    let mconfig = ModelConfig {
        note_length: args.note_length,
        embed_dim: args.embed_dim,
        ..ModelConfig::default()
    };
    let tconfig = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        lr: args.lr,
        momentum: args.momentum,
        weight_decay: args.weight_decay,
        seed: args.seed,
        use_smote: !args.no_smote,
        smote_target_ratio: args.smote_ratio,
        smote_k: args.smote_k,
        class_weight_mode: parse_class_weights(&args.class_weights)?,
        patience: args.patience,
    };
    let table = match &args.embeddings {
        Some(path) => EmbeddingTable::load(path)?,
        None => EmbeddingTable::empty(mconfig.embed_dim),
    };

    let trained = train(&train_ds, &val_ds, &mconfig, &tconfig, &table)?;
    let checkpoint = Checkpoint {
        condition: args.condition,
        config: mconfig,
        vocab_hash: trained.encoder.vocab_hash(),
        params: trained.params,
    };

    out.seed(args.seed)
        .config("condition", args.condition)
        .config("epochs", tconfig.epochs)
        .config("batch_size", tconfig.batch_size)
        .config("lr", tconfig.lr)
        .config("momentum", tconfig.momentum)
        .config("weight_decay", tconfig.weight_decay)
        .config("use_smote", tconfig.use_smote)
        .config("smote_ratio", tconfig.smote_target_ratio)
        .config("smote_k", tconfig.smote_k)
        .config("class_weights", &args.class_weights)
        .config("note_length", args.note_length)
        .config("embed_dim", args.embed_dim)
        .config("w_pos", trained.class_weights.0)
        .config("w_neg", trained.class_weights.1);
    out.file(args.out_dir.join("model.json"), checkpoint.to_json_bytes()?);
    out.file(
        args.out_dir.join("encoder.json"),
        serde_json::to_vec_pretty(&trained.encoder)?,
    );
    out.file(
        args.out_dir.join("curve.csv"),
        trained.curve.to_csv().into_bytes(),
    );
    out.commit(&args.out_dir.join("manifest.json"))?;
    Ok(())
}
