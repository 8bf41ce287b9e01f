use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Parser;

use trinet::data::{Dataset, EncoderSpec};
use trinet::nn::Checkpoint;
use trinet::train::predict_batch;

use crate::output::OutputSet;

#[derive(Parser)]
pub struct Args {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub encoder: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV: index,probability (dataset order).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let mut out = OutputSet::new("predict");
    out.input(&args.model)?;
    out.input(&args.encoder)?;
    out.input(&args.data)?;

    let checkpoint = Checkpoint::load(&args.model)?;
    let encoder = EncoderSpec::load(&args.encoder)?;
    if encoder.vocab_hash() != checkpoint.vocab_hash {
        bail!(
            "encoder vocabulary hash {:016x} does not match checkpoint {:016x}",
            encoder.vocab_hash(),
            checkpoint.vocab_hash
        );
    }
    let dataset = Dataset::read_ndjson_path(&args.data, checkpoint.condition)?;
    let probs = predict_batch(&dataset, &checkpoint.params, &encoder, &checkpoint.config)?;

    let mut csv = String::from("index,probability\n");
    for (i, p) in probs.iter().enumerate() {
        let _ = writeln!(csv, "{i},{p:.12}");
    }

    out.config("condition", checkpoint.condition)
        .config("records", dataset.len());
    out.file(args.out.clone(), csv.into_bytes());
    let manifest = args.out.with_file_name(format!(
        "{}.manifest.json",
        args.out.file_name().unwrap_or_default().to_string_lossy()
    ));
    out.commit(&manifest)?;
    Ok(())
}
