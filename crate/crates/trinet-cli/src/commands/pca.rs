use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Parser;

use trinet::data::EncoderSpec;
use trinet::nn::Checkpoint;
use trinet::text::pca_project;

use crate::output::OutputSet;

#[derive(Parser)]
pub struct Args {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub encoder: PathBuf,
    /// Output CSV: token followed by one column per component.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub components: usize,
}

pub fn run(args: Args) -> Result<()> {
    let mut out = OutputSet::new("pca");
    out.input(&args.model)?;
    out.input(&args.encoder)?;

    let checkpoint = Checkpoint::load(&args.model)?;
    let encoder = EncoderSpec::load(&args.encoder)?;
    if encoder.vocab_hash() != checkpoint.vocab_hash {
        bail!(
            "encoder vocabulary hash {:016x} does not match checkpoint {:016x}",
            encoder.vocab_hash(),
            checkpoint.vocab_hash
        );
    }

    let embedding = &checkpoint.params.embedding;
    let matrix: Vec<Vec<f64>> = (0..embedding.rows)
        .map(|r| embedding.row(r).to_vec())
        .collect();
    let projection = pca_project(&matrix, args.components)?;

    let mut csv = String::from("token");
    for c in 0..args.components {
        let _ = write!(csv, ",pc{}", c + 1);
    }
    csv.push('\n');
    for (token, coords) in encoder.token_vocab().iter().zip(&projection.coordinates) {
        let _ = write!(csv, "{token}");
        for v in coords {
            let _ = write!(csv, ",{v:.9}");
        }
        csv.push('\n');
    }

    out.config("components", args.components)
        .config("tokens", encoder.vocab_size())
        .config(
            "explained_variance",
            format!("{:?}", projection.explained_variance),
        );
    out.file(args.out.clone(), csv.into_bytes());
    let manifest = args.out.with_file_name(format!(
        "{}.manifest.json",
        args.out.file_name().unwrap_or_default().to_string_lossy()
    ));
    out.commit(&manifest)?;
    Ok(())
}
