//! `sentivec` command-line front end.
//!
//! Wires the full pipeline: vocabulary building, two-stage training, seed
//! injection plus controlled retraining, polarity scoring, cross-model
//! diffing, 2-D projection export, and document classification.

mod commands;
mod config;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Ctx;
use config::Settings;

#[derive(Parser, Debug)]
#[command(
    name = "sentivec",
    about = "Sentiment-aware word embeddings: train, seed, score, diff, classify",
    version
)]
struct Cli {
    /// Flat key=value config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random draw
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Training worker threads (1 = deterministic)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress progress output
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a frequency-filtered vocabulary from a corpus
    Vocab(commands::VocabArgs),
    /// Train skip-gram vectors, optionally continuing from pretrained ones
    Train(commands::TrainArgs),
    /// Inject lexicon seed vectors and retrain for a controlled spell
    SeedRetrain(commands::SeedRetrainArgs),
    /// Score word polarity against seed centroids
    Polarity(commands::PolarityArgs),
    /// Compare word polarity across models and report flips
    Diff(commands::DiffArgs),
    /// Export 2-D PCA projections of selected words
    Project(commands::ProjectArgs),
    /// Train and evaluate the document sentiment classifier
    Classify(commands::ClassifyArgs),
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let mut settings = Settings::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        settings.seed = seed;
        settings.explicit.insert("seed".to_owned());
    }
    if let Some(threads) = cli.threads {
        settings.threads = threads;
        settings.explicit.insert("threads".to_owned());
    }
    let mut ctx = Ctx {
        settings,
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::Vocab(args) => commands::cmd_vocab(&mut ctx, args),
        Command::Train(args) => commands::cmd_train(&mut ctx, args),
        Command::SeedRetrain(args) => commands::cmd_seed_retrain(&mut ctx, args),
        Command::Polarity(args) => commands::cmd_polarity(&mut ctx, args),
        Command::Diff(args) => commands::cmd_diff(&mut ctx, args),
        Command::Project(args) => commands::cmd_project(&mut ctx, args),
        Command::Classify(args) => commands::cmd_classify(&mut ctx, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // one machine-parsable line; module-prefixed for library errors
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
