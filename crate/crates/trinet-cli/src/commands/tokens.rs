use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Parser;

use trinet::data::{Condition, Dataset};
use trinet::text::token_frequency_report;

use crate::output::OutputSet;

#[derive(Parser)]
pub struct Args {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub condition: Condition,
    /// Output CSV: token,pos_freq,neg_freq,rel_diff.
    #[arg(long)]
    pub out: PathBuf,
    /// Keep tokens whose relative frequency difference exceeds this.
    #[arg(long, default_value_t = 0.5)]
    pub min_rel_diff: f64,
    /// Keep tokens contained in at least this many records.
    #[arg(long, default_value_t = 5)]
    pub min_support: usize,
}

pub fn run(args: Args) -> Result<()> {
    let mut out = OutputSet::new("tokens");
    out.input(&args.data)?;

    let dataset = Dataset::read_ndjson_path(&args.data, args.condition)?;
    let rows = token_frequency_report(&dataset, args.min_rel_diff, args.min_support)?;

    let mut csv = String::from("token,pos_freq,neg_freq,rel_diff\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{:.9},{:.9},{:.9}",
            row.token, row.pos_freq, row.neg_freq, row.rel_diff
        );
    }

    out.config("condition", args.condition)
        .config("min_rel_diff", args.min_rel_diff)
        .config("min_support", args.min_support)
        .config("rows", rows.len());
    out.file(args.out.clone(), csv.into_bytes());
    let manifest = args.out.with_file_name(format!(
        "{}.manifest.json",
        args.out.file_name().unwrap_or_default().to_string_lossy()
    ));
    out.commit(&manifest)?;
    Ok(())
}
