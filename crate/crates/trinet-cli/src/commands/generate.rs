use std::path::PathBuf;

use anyhow::Result;
use clap::Parser;

use trinet::data::Condition;
use trinet::synth::{generate, GeneratorConfig};

use crate::output::OutputSet;

#[derive(Parser)]
pub struct Args {
    /// Target condition: pneumonia or uti.
    #[arg(long)]
    pub condition: Condition,
    /// Number of records.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output dataset path (NDJSON).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.06)]
    pub prevalence: f64,
    /// Temperature shift for UTI positives (degrees C).
    #[arg(long, default_value_t = 1.5)]
    pub temp_shift: f64,
    /// Weight-for-age factor for pneumonia positives.
    #[arg(long, default_value_t = 0.6)]
    pub weight_factor: f64,
    #[arg(long, default_value_t = 0.5)]
    pub token_prob_pos: f64,
    #[arg(long, default_value_t = 0.05)]
    pub token_prob_neg: f64,
    #[arg(long, default_value_t = 0.1)]
    pub missing_rate: f64,
    /// Switch off every planted effect (useful as a negative control).
    #[arg(long, default_value_t = false)]
    pub null_signal: bool,
}

pub fn run(args: Args) -> Result<()> {
    let mut config = GeneratorConfig::new(args.condition, args.n, args.seed);
    config.prevalence = args.prevalence;
    config.temp_shift_c = args.temp_shift;
    config.weight_factor = args.weight_factor;
    config.signal_token_prob_pos = args.token_prob_pos;
    config.signal_token_prob_neg = args.token_prob_neg;
    config.missing_rate = args.missing_rate;
    if args.null_signal {
        config = config.null_signal();
    }

    let dataset = generate(&config)?;
    let bytes = dataset.to_ndjson_bytes()?;

    let mut out = OutputSet::new("generate");
    out.seed(args.seed)
        .config("condition", args.condition)
        .config("n", args.n)
        .config("prevalence", config.prevalence)
        .config("temp_shift_c", config.temp_shift_c)
        .config("weight_factor", config.weight_factor)
        .config("signal_token_prob_pos", config.signal_token_prob_pos)
        .config("signal_token_prob_neg", config.signal_token_prob_neg)
        .config("missing_rate", config.missing_rate)
        .config("null_signal", args.null_signal);
    out.file(args.out.clone(), bytes);
    let manifest = args.out.with_file_name(format!(
        "{}.manifest.json",
        args.out.file_name().unwrap_or_default().to_string_lossy()
    ));
    out.commit(&manifest)?;
    Ok(())
}
