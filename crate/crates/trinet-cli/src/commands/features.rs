use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Parser;

use trinet::data::{Condition, Dataset};
use trinet::metrics::{feature_distribution, ClassSummary, DEFAULT_BINS};

use crate::output::OutputSet;

#[derive(Parser)]
pub struct Args {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub condition: Condition,
    /// Continuous feature name (e.g. temp_c, weight_kg, pulse).
    #[arg(long)]
    pub feature: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
}

fn class_block(text: &mut String, summary: &ClassSummary, bin_start: f64, bin_width: f64) {
    let _ = writeln!(text, "class: {}", summary.label);
    let _ = writeln!(text, "  count: {}", summary.count);
    let _ = writeln!(
        text,
        "  min {:.6}  q1 {:.6}  median {:.6}  q3 {:.6}  max {:.6}",
        summary.min, summary.q1, summary.median, summary.q3, summary.max
    );
    let _ = writeln!(text, "  histogram (bin_start bin_end count):");
    for (i, count) in summary.histogram.iter().enumerate() {
        let lo = bin_start + bin_width * i as f64;
        let hi = lo + bin_width;
        let _ = writeln!(text, "    {lo:.6} {hi:.6} {count}");
    }
}

pub fn run(args: Args) -> Result<()> {
    let mut out = OutputSet::new("features");
    out.input(&args.data)?;

    let dataset = Dataset::read_ndjson_path(&args.data, args.condition)?;
    let dist = feature_distribution(&dataset, &args.feature, args.bins)?;

    let mut text = String::new();
    let _ = writeln!(text, "condition: {}", args.condition);
    let _ = writeln!(text, "feature: {}", dist.feature);
    let _ = writeln!(text, "bins: {} (width {:.6})", dist.bins, dist.bin_width);
    let _ = writeln!(text);
    class_block(&mut text, &dist.negative, dist.bin_start, dist.bin_width);
    let _ = writeln!(text);
    class_block(&mut text, &dist.positive, dist.bin_start, dist.bin_width);

    out.config("condition", args.condition)
        .config("feature", &args.feature)
        .config("bins", args.bins);
    out.file(args.out.clone(), text.into_bytes());
    let manifest = args.out.with_file_name(format!(
        "{}.manifest.json",
        args.out.file_name().unwrap_or_default().to_string_lossy()
    ));
    out.commit(&manifest)?;
    Ok(())
}
