use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use style_seam::{Aggregation, EnsembleMode, Error, Split};
use style_seam_cli::commands;
use style_seam_cli::{FileConfig, Overrides, RunConfig, DATASET_ENV};

/// Paragraph-level style change detection.
#[derive(Parser)]
#[command(name = "style-seam", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file with defaults for the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding one subdirectory per difficulty.
    #[arg(long, global = true)]
    dataset_root: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["easy", "medium", "hard", "all"])]
    difficulty: Option<String>,
    #[arg(long, global = true, value_parser = ["train", "validation", "test"])]
    split: Option<String>,
    #[arg(long, global = true, value_parser = ["transition", "longest_first"])]
    strategy: Option<String>,
    /// Token budget shared by both paragraphs of a pair.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    warmup_ratio: Option<f64>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    peak_lr: Option<f64>,
    /// L2 regularization strength.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Stopword file, one word per line.
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Count documents and labeled pairs.
    Stats {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the TF-IDF vocabulary and linear classifier.
    Train {
        #[arg(long)]
        out: PathBuf,
    },
    /// Score pairs with a trained model.
    Predict {
        /// Output directory of `train`.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score solution files against truth files.
    Evaluate {
        /// Directory of solution files.
        #[arg(long)]
        predictions: PathBuf,
        /// Truth directory; defaults to the dataset split.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Average per-document scores instead of pooling all pairs.
        #[arg(long)]
        per_document: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Combine prediction files.
    Ensemble {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_parser = ["majority", "softmax_mean"], default_value = "majority")]
        mode: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Uniform random predictions.
    RandomBaseline {
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve(common: Common) -> Result<RunConfig, Error> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        dataset_root: common.dataset_root,
        difficulty: common.difficulty,
        split: common.split.as_deref().map(str::parse::<Split>).transpose()?,
        strategy: common.strategy,
        budget: common.budget,
        seed: common.seed,
        warmup_ratio: common.warmup_ratio,
        epochs: common.epochs,
        batch_size: common.batch_size,
        peak_lr: common.peak_lr,
        lambda: common.lambda,
        stopwords: common.stopwords,
    };
    let env_root = std::env::var_os(DATASET_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    RunConfig::resolve(flags, file, env_root)
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = resolve(cli.common)?;
    match cli.command {
        Command::Stats { out } => {
            for s in commands::stats(&cfg, out.as_deref())? {
                println!("{s}");
            }
        }
        Command::Train { out } => {
            for s in commands::train(&cfg, &out)? {
                println!("{s}");
            }
        }
        Command::Predict { model, out } => {
            for s in commands::predict_with_model(&cfg, &model, &out)? {
                println!("{s}");
            }
        }
        Command::Evaluate {
            predictions,
            truth,
            per_document,
            out,
        } => {
            let aggregation = if per_document {
                Aggregation::PerDocument
            } else {
                Aggregation::Pooled
            };
            let report = commands::evaluate(&cfg, &predictions, truth.as_deref(), aggregation, out.as_deref())?;
            print!("{report}");
        }
        Command::Ensemble { files, mode, out } => {
            let mode: EnsembleMode = mode.parse()?;
            println!("{}", commands::combine(&files, mode, &out)?);
        }
        Command::RandomBaseline { out } => {
            for s in commands::random(&cfg, &out)? {
                println!("{s}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(1),
    }
}
