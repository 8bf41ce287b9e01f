//! Command-line surface for the triage screening pipeline.

mod commands;
mod output;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "trinet",
    version,
    about = "Triage screening pipeline: synthetic data, model training, \
             PPV-focused evaluation, token/feature analyses, and an ED \
             workflow simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic triage dataset (NDJSON).
    Generate(commands::generate::Args),
    /// Split a dataset, train the two-branch model, write checkpoint,
    /// encoder and learning curve.
    Train(commands::train::Args),
    /// Select a PPV-maximizing threshold on validation and report on the
    /// held-out test split, with ROC points and benchmark comparison.
    Eval(commands::eval::Args),
    /// Write per-record probabilities for a dataset.
    Predict(commands::predict::Args),
    /// Report tokens whose per-class document frequencies differ.
    Tokens(commands::tokens::Args),
    /// Project the trained embedding matrix onto principal components.
    Pca(commands::pca::Args),
    /// Per-class distribution summary for a continuous feature.
    Features(commands::features::Args),
    /// Run the ED workflow simulator (one mode or a paired comparison).
    Simulate(commands::simulate::Args),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Predict(args) => commands::predict::run(args),
        Command::Tokens(args) => commands::tokens::run(args),
        Command::Pca(args) => commands::pca::run(args),
        Command::Features(args) => commands::features::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
