mod args;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use args::{CleanseFlags, CorpusArgs, SelectFlags, SimFlags};

#[derive(Parser)]
#[command(
    name = "argq",
    version,
    about = "Cleanse, aggregate, check and evaluate crowd-labeled argument quality data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ItemKind {
    Pairs,
    Arguments,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Grouping {
    Motion,
    Concept,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum StatOp {
    Pearson,
    Spearman,
    Auc,
    Accuracy,
    Wilcoxon,
    WeightedMean,
}

#[derive(Subcommand)]
enum Command {
    /// Load and check a corpus, optionally with folds and predictions files
    Validate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Folds file to check for a clean partition of the corpus items
        #[arg(long)]
        folds: Option<PathBuf>,
        /// Predictions file to check (every test item covered when --folds is given)
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Write the corpus back out in canonical form into this directory
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Filter annotators and arguments of the individual labeling task
    CleanIndividual {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        flags: CleanseFlags,
        /// TOML file with any of the threshold fields
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for the cleansed corpus and cleanse_report.json
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter annotators and pairs of the pairwise labeling task
    CleanPairs {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        flags: CleanseFlags,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score arguments and label pairs from a (cleansed) corpus
    Aggregate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Directory for scores.jsonl and labels.jsonl
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample eligible same-motion argument pairs for pairwise annotation
    SelectPairs {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// scores.jsonl from aggregate
        #[arg(long)]
        scores: PathBuf,
        #[command(flatten)]
        flags: SelectFlags,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output pairs file
        #[arg(long)]
        out: PathBuf,
    },
    /// Expected-winner agreement, split-half reproducibility, relabel correlation and transitivity
    Consistency {
        /// Cleansed individual-task corpus directory
        #[arg(long)]
        individual: Option<PathBuf>,
        /// Cleansed pairs-task corpus directory
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// scores.jsonl (default: computed from --individual)
        #[arg(long)]
        scores: Option<PathBuf>,
        /// labels.jsonl (default: computed from --pairs)
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Second-round labels.jsonl for the same pairs
        #[arg(long)]
        relabel: Option<PathBuf>,
        /// Score-difference cut-offs for expected-winner agreement
        #[arg(long, value_delimiter = ',', default_value = "0,0.5")]
        score_diff_min: Vec<f64>,
        /// Valid quality annotations an argument needs for the split-half analysis
        #[arg(long, default_value_t = 14)]
        min_annotations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Leave-one-group-out folds over pairs or arguments
    Folds {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_enum, default_value = "pairs")]
        items: ItemKind,
        #[arg(long, value_enum, default_value = "motion")]
        grouping: Grouping,
        #[arg(long)]
        out: PathBuf,
    },
    /// Token-count baseline predictions for every test pair
    Baseline {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        folds: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Accuracy and AUC of pair predictions per fold
    EvalPairs {
        #[arg(long)]
        predictions: PathBuf,
        /// labels.jsonl with gold winners
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        folds: PathBuf,
    },
    /// Pearson and Spearman of score predictions per fold
    EvalRank {
        #[arg(long)]
        predictions: PathBuf,
        /// scores.jsonl with gold quality scores
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        folds: PathBuf,
    },
    /// Wilcoxon signed-rank test on the per-fold metric of two eval reports
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        metric: String,
    },
    /// Generate a synthetic campaign with planted truth
    Simulate {
        #[command(flatten)]
        flags: SimFlags,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Statistics on one-value-per-line column files
    Stats {
        #[arg(value_enum)]
        op: StatOp,
        #[arg(long)]
        x: PathBuf,
        /// Second column: values, 0/1 labels for auc, or weights for weighted-mean
        #[arg(long)]
        y: PathBuf,
    },
    /// Argument length profile and, given a vocabulary, text cleanliness
    Profile {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Newline-delimited vocabulary; the first field of each line is used
        #[arg(long)]
        vocabulary: Option<PathBuf>,
        /// Match tokens against the vocabulary case-sensitively
        #[arg(long)]
        cased: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    use commands::*;
    match cli.command {
        Command::Validate {
            corpus,
            folds,
            predictions,
            emit,
        } => validate(&corpus, folds.as_deref(), predictions.as_deref(), emit.as_deref()),
        Command::CleanIndividual { corpus, flags, config, out } => {
            clean(&corpus, &flags, config.as_deref(), &out, argq_core::cleanse::Task::Individual)
        }
        Command::CleanPairs { corpus, flags, config, out } => {
            clean(&corpus, &flags, config.as_deref(), &out, argq_core::cleanse::Task::Pairs)
        }
        Command::Aggregate { corpus, out } => aggregate(&corpus, &out),
        Command::SelectPairs {
            corpus,
            scores,
            flags,
            config,
            out,
        } => select(&corpus, &scores, &flags, config.as_deref(), &out),
        Command::Consistency {
            individual,
            pairs,
            scores,
            labels,
            relabel,
            score_diff_min,
            min_annotations,
            seed,
        } => consistency(ConsistencyInputs {
            individual,
            pairs,
            scores,
            labels,
            relabel,
            score_diff_min,
            min_annotations,
            seed,
        }),
        Command::Folds {
            corpus,
            items,
            grouping,
            out,
        } => folds(&corpus, items, grouping, &out),
        Command::Baseline { corpus, folds, out } => baseline(&corpus, &folds, &out),
        Command::EvalPairs {
            predictions,
            labels,
            folds,
        } => eval_pairs(&predictions, &labels, &folds),
        Command::EvalRank {
            predictions,
            scores,
            folds,
        } => eval_rank(&predictions, &scores, &folds),
        Command::Compare { a, b, metric } => compare(&a, &b, &metric),
        Command::Simulate { flags, config, out } => simulate(&flags, config.as_deref(), &out),
        Command::Stats { op, x, y } => stats(op, &x, &y),
        Command::Profile {
            corpus,
            vocabulary,
            cased,
        } => profile(&corpus, vocabulary.as_deref(), cased),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
