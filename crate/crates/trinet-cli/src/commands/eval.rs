use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Parser;

use trinet::data::{stratified_split, Dataset, EncoderSpec, SplitRatios};
use trinet::metrics::{
    benchmark_table, confusion, rates, roc_auc, select_threshold_max_ppv, RocCurve,
    DEFAULT_MIN_PREDICTED_POSITIVES, DEFAULT_MIN_TPR,
};
use trinet::nn::Checkpoint;
use trinet::train::predict_batch;

use crate::output::OutputSet;

#[derive(Parser)]
pub struct Args {
    /// Trained checkpoint (model.json from `train`).
    #[arg(long)]
    pub model: PathBuf,
    /// Fitted encoder (encoder.json from `train`).
    #[arg(long)]
    pub encoder: PathBuf,
    /// The dataset that was passed to `train`.
    #[arg(long)]
    pub data: PathBuf,
    /// Directory receiving report.txt, roc.csv and the run manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Must match the seed used by `train` so the held-out test split is
    /// reproduced exactly.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MIN_PREDICTED_POSITIVES)]
    pub min_predicted_positives: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_TPR)]
    pub min_tpr: f64,
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "undefined".to_string(),
    }
}

fn fmt_opt_short(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.2}"),
        None => "-".to_string(),
    }
}

fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr\n");
    for p in &curve.points {
        let _ = writeln!(out, "{:.9},{:.9}", p.fpr, p.tpr);
    }
    out
}

pub fn run(args: Args) -> Result<()> {
    let mut out = OutputSet::new("eval");
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
    let (_train_ds, val_ds, test_ds) =
        stratified_split(&dataset, SplitRatios::default(), args.seed)?;

    let val_probs = predict_batch(&val_ds, &checkpoint.params, &encoder, &checkpoint.config)?;
    let test_probs = predict_batch(&test_ds, &checkpoint.params, &encoder, &checkpoint.config)?;
    let val_labels = val_ds.labels();
    let test_labels = test_ds.labels();

    let selection = select_threshold_max_ppv(
        &val_probs,
        &val_labels,
        args.min_predicted_positives,
        args.min_tpr,
    )?;
    let test_cm = confusion(&test_probs, &test_labels, selection.threshold)?;
    let test_rates = rates(&test_cm);
    let curve = roc_auc(&test_probs, &test_labels)?;

    let mut report = String::new();
    let _ = writeln!(report, "condition: {}", checkpoint.condition);
    let _ = writeln!(report, "records: {} (val {}, test {})", dataset.len(), val_ds.len(), test_ds.len());
    let _ = writeln!(report);
    let _ = writeln!(report, "threshold selected on validation: {:.9}", selection.threshold);
    let _ = writeln!(
        report,
        "validation at threshold: ppv {:.6} tpr {:.6} predicted_positives {}",
        selection.ppv, selection.tpr, selection.predicted_positives
    );
    let _ = writeln!(report);
    let _ = writeln!(
        report,
        "test confusion: tp {} fp {} tn {} fn {}",
        test_cm.tp, test_cm.fp, test_cm.tn, test_cm.fn_
    );
    let _ = writeln!(
        report,
        "test rates: ppv {} tpr {} tnr {} fpr {}",
        fmt_opt(test_rates.ppv),
        fmt_opt(test_rates.tpr),
        fmt_opt(test_rates.tnr),
        fmt_opt(test_rates.fpr)
    );
    let _ = writeln!(report, "test auc: {:.6}", curve.auc);
    let _ = writeln!(report);
    let _ = writeln!(report, "benchmark comparison ({}):", checkpoint.condition);
    let _ = writeln!(report, "  {:<12} {:>6} {:>6} {:>6}", "method", "ppv", "tnr", "tpr");
    let _ = writeln!(
        report,
        "  {:<12} {:>6} {:>6} {:>6}",
        "this-run",
        fmt_opt_short(test_rates.ppv),
        fmt_opt_short(test_rates.tnr),
        fmt_opt_short(test_rates.tpr)
    );
    for row in benchmark_table() {
        if row.condition == checkpoint.condition {
            let _ = writeln!(
                report,
                "  {:<12} {:>6} {:>6} {:>6}",
                row.method.to_string(),
                fmt_opt_short(row.ppv),
                fmt_opt_short(row.tnr),
                fmt_opt_short(row.tpr)
            );
        }
    }

    out.seed(args.seed)
        .config("condition", checkpoint.condition)
        .config("min_predicted_positives", args.min_predicted_positives)
        .config("min_tpr", args.min_tpr)
        .config("threshold", format!("{:.9}", selection.threshold));
    out.file(args.out_dir.join("report.txt"), report.into_bytes());
    out.file(args.out_dir.join("roc.csv"), roc_csv(&curve).into_bytes());
    out.commit(&args.out_dir.join("manifest.json"))?;
    Ok(())
}
