use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use argq_core::aggregate::{label_pairs, score_arguments, select_pairs};
use argq_core::cleanse::{cleanse, CleanseConfig, Task};
use argq_core::consistency::{expected_winner_agreement, relabel_correlation, split_half_reproducibility, transitivity};
use argq_core::eval::{
    argument_folds, baseline_predictions, check_partition, compare_reports, evaluate_pairs, evaluate_ranking,
    pair_folds, read_folds, read_predictions, write_folds, write_predictions, EvalReport, FoldGrouping,
};
use argq_core::ingest::{
    cleanliness_report, length_profile, load_corpus, read_jsonl, write_corpus, write_jsonl, CorpusPaths, PairRecord,
    Vocabulary,
};
use argq_core::model::{LabeledPair, ScoredArgument};
use argq_core::simulate::simulate as run_simulation;
use argq_core::{stats as kernel, Corpus};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{read_config, CleanseFlags, CorpusArgs, SelectFlags, SimFlags};
use crate::{Grouping, ItemKind, StatOp};

pub const CLEANSE_REPORT_FILE: &str = "cleanse_report.json";
pub const SCORES_FILE: &str = "scores.jsonl";
pub const LABELS_FILE: &str = "labels.jsonl";

fn emit(value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        // a closed downstream pipe (e.g. `| head`) is not an error
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.context("writing to stdout"),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load(corpus: &CorpusArgs) -> Result<Corpus> {
    Ok(load_corpus(&corpus.paths()?)?)
}

fn load_dir(dir: &Path) -> Result<Corpus> {
    Ok(load_corpus(&CorpusPaths::in_dir(dir))?)
}

fn read_scores(path: &Path) -> Result<Vec<ScoredArgument>> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, r)| r).collect())
}

fn read_labels(path: &Path) -> Result<Vec<LabeledPair>> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, r)| r).collect())
}

fn grouping(g: Grouping) -> FoldGrouping {
    match g {
        Grouping::Motion => FoldGrouping::Motion,
        Grouping::Concept => FoldGrouping::Concept,
    }
}

fn corpus_summary(corpus: &Corpus) -> Value {
    json!({
        "motions": corpus.motions().len(),
        "arguments": corpus.arguments().len(),
        "pairs": corpus.pairs().len(),
        "judgments": corpus.judgments().len(),
        "warnings": corpus.warnings(),
    })
}

pub fn validate(corpus: &CorpusArgs, folds: Option<&Path>, predictions: Option<&Path>, emit_dir: Option<&Path>) -> Result<()> {
    let corpus = load(corpus)?;
    let mut out = json!({ "corpus": corpus_summary(&corpus) });

    let folds = match folds {
        Some(path) => {
            let folds = read_folds(path)?;
            check_partition(&folds)?;
            // every item must be a pair of the corpus, or else every item an argument
            let ids: BTreeSet<&str> = folds.iter().flat_map(|f| f.test.iter().map(String::as_str)).collect();
            let all_pairs = ids.iter().all(|id| corpus.pair(id).is_some());
            let all_args = ids.iter().all(|id| corpus.argument(id).is_some());
            if !all_pairs && !all_args {
                let stray = ids
                    .iter()
                    .find(|id| corpus.pair(id).is_none() && corpus.argument(id).is_none())
                    .copied()
                    .unwrap_or_default();
                bail!("{}: item '{stray}' is neither a pair nor an argument of the corpus", path.display());
            }
            out["folds"] = json!({
                "n_folds": folds.len(),
                "n_items": ids.len(),
                "items": if all_pairs { "pairs" } else { "arguments" },
            });
            Some(folds)
        }
        None => None,
    };

    if let Some(path) = predictions {
        let preds = read_predictions(path)?;
        let mut covered = 0usize;
        if let Some(folds) = &folds {
            for f in folds {
                for item in &f.test {
                    preds.get(&f.fold_id, item)?;
                    covered += 1;
                }
            }
        }
        out["predictions"] = json!({ "n_records": preds.len(), "n_test_items_covered": covered });
    }

    if let Some(dir) = emit_dir {
        write_corpus(&corpus, dir)?;
    }
    emit(&out)
}

pub fn clean(corpus: &CorpusArgs, flags: &CleanseFlags, config: Option<&Path>, out: &Path, task: Task) -> Result<()> {
    let file: CleanseFlags = read_config(config)?;
    let cfg: CleanseConfig = flags.resolve(&file, task)?;
    let corpus = load(corpus)?;
    let (cleaned, report) = cleanse(&corpus, &cfg)?;
    write_corpus(&cleaned, out)?;
    write_json(&out.join(CLEANSE_REPORT_FILE), &report)?;
    emit(&report)
}

pub fn aggregate(corpus: &CorpusArgs, out: &Path) -> Result<()> {
    let corpus = load(corpus)?;
    let mask = vec![true; corpus.judgments().len()];
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let scored = score_arguments(&corpus, &mask)?;
    let labeled = label_pairs(&corpus, &mask)?;
    let mut summary = json!({});
    if !scored.arguments.is_empty() {
        write_jsonl(&out.join(SCORES_FILE), &scored.arguments)?;
        summary["scores"] = json!({ "n_scored": scored.arguments.len(), "excluded": scored.excluded });
    }
    if !corpus.pairs().is_empty() {
        write_jsonl(&out.join(LABELS_FILE), &labeled.pairs)?;
        summary["labels"] = json!({ "n_labeled": labeled.pairs.len(), "excluded": labeled.excluded });
    }
    if scored.arguments.is_empty() && corpus.pairs().is_empty() {
        bail!("nothing to aggregate: no quality judgments and no pairs");
    }
    emit(&summary)
}

pub fn select(corpus: &CorpusArgs, scores: &Path, flags: &SelectFlags, config: Option<&Path>, out: &Path) -> Result<()> {
    let file: SelectFlags = read_config(config)?;
    let cfg = flags.resolve(&file);
    let corpus = load(corpus)?;
    let scored = read_scores(scores)?;
    let pairs = select_pairs(&scored, &corpus, &cfg)?;
    write_jsonl(out, pairs.iter().map(PairRecord::from))?;
    emit(&json!({ "config": cfg, "n_selected": pairs.len() }))
}

pub struct ConsistencyInputs {
    pub individual: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub relabel: Option<PathBuf>,
    pub score_diff_min: Vec<f64>,
    pub min_annotations: usize,
    pub seed: u64,
}

pub fn consistency(inp: ConsistencyInputs) -> Result<()> {
    let individual = inp.individual.as_deref().map(load_dir).transpose()?;
    let pairs = inp.pairs.as_deref().map(load_dir).transpose()?;
    if individual.is_none() && pairs.is_none() {
        bail!("pass --individual and/or --pairs");
    }

    let scored = match (&inp.scores, &individual) {
        (Some(path), _) => Some(read_scores(path)?),
        (None, Some(c)) => Some(score_arguments(c, &vec![true; c.judgments().len()])?.arguments),
        (None, None) => None,
    };
    let labeled = match (&inp.labels, &pairs) {
        (Some(path), _) => Some(read_labels(path)?),
        (None, Some(c)) => Some(label_pairs(c, &vec![true; c.judgments().len()])?.pairs),
        (None, None) => None,
    };

    let mut out = json!({});
    if let (Some(scored), Some(labeled), Some(pc)) = (&scored, &labeled, &pairs) {
        let reports = inp
            .score_diff_min
            .iter()
            .map(|&d| expected_winner_agreement(scored, labeled, pc, d))
            .collect::<argq_core::Result<Vec<_>>>()?;
        out["expected_winner"] = serde_json::to_value(reports)?;
    }
    if let Some(c) = &individual {
        let mask = vec![true; c.judgments().len()];
        out["split_half"] = serde_json::to_value(split_half_reproducibility(c, &mask, inp.min_annotations, inp.seed)?)?;
    }
    if let (Some(labeled), Some(pc)) = (&labeled, &pairs) {
        out["transitivity"] = serde_json::to_value(transitivity(labeled, pc)?)?;
    }
    if let Some(path) = &inp.relabel {
        let Some(labeled) = &labeled else {
            bail!("--relabel needs first-round labels from --labels or --pairs");
        };
        let r = relabel_correlation(labeled, &read_labels(path)?)?;
        out["relabel"] = json!({ "pearson_r": r });
    }
    emit(&out)
}

pub fn folds(corpus: &CorpusArgs, items: ItemKind, g: Grouping, out: &Path) -> Result<()> {
    let corpus = load(corpus)?;
    let folds = match items {
        ItemKind::Pairs => pair_folds(&corpus, grouping(g))?,
        ItemKind::Arguments => argument_folds(&corpus, grouping(g))?,
    };
    write_folds(out, &folds)?;
    let sizes: Vec<Value> = folds
        .iter()
        .map(|f| json!({ "fold_id": f.fold_id, "train": f.train.len(), "test": f.test.len() }))
        .collect();
    emit(&json!({ "n_folds": folds.len(), "folds": sizes }))
}

pub fn baseline(corpus: &CorpusArgs, folds: &Path, out: &Path) -> Result<()> {
    let corpus = load(corpus)?;
    let folds = read_folds(folds)?;
    let records = baseline_predictions(&corpus, &folds)?;
    write_predictions(out, &records)?;
    emit(&json!({ "n_predictions": records.len() }))
}

pub fn eval_pairs(predictions: &Path, labels: &Path, folds: &Path) -> Result<()> {
    let report = evaluate_pairs(&read_predictions(predictions)?, &read_labels(labels)?, &read_folds(folds)?)?;
    emit(&report)
}

pub fn eval_rank(predictions: &Path, scores: &Path, folds: &Path) -> Result<()> {
    let report = evaluate_ranking(&read_predictions(predictions)?, &read_scores(scores)?, &read_folds(folds)?)?;
    emit(&report)
}

fn read_report(path: &Path) -> Result<EvalReport> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn compare(a: &Path, b: &Path, metric: &str) -> Result<()> {
    let (ra, rb) = (read_report(a)?, read_report(b)?);
    let t = compare_reports(&ra, &rb, metric)?;
    emit(&json!({
        "metric": metric,
        "a_weighted": ra.weighted.get(metric),
        "b_weighted": rb.weighted.get(metric),
        "n": t.n,
        "w_plus": t.w_plus,
        "p_value": t.p_value,
        "exact": t.exact,
    }))
}

pub fn simulate(flags: &SimFlags, config: Option<&Path>, out: &Path) -> Result<()> {
    let file: SimFlags = read_config(config)?;
    let cfg = flags.resolve(&file)?;
    let sim = run_simulation(&cfg)?;
    write_corpus(&sim.individual_corpus()?, &out.join("individual"))?;
    if !sim.pairs.is_empty() {
        write_corpus(&sim.pairs_corpus()?, &out.join("pairs"))?;
    }
    write_jsonl(&out.join("truth.jsonl"), &sim.truth)?;
    write_jsonl(&out.join("annotators.jsonl"), sim.annotator_records())?;
    emit(&json!({
        "seed": cfg.seed,
        "motions": sim.motions.len(),
        "arguments": sim.arguments.len(),
        "pairs": sim.pairs.len(),
        "individual_judgments": sim.individual_judgments.len(),
        "pair_judgments": sim.pair_judgments.len(),
        "annotators": sim.annotators.len(),
    }))
}

fn read_column(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn numbers(path: &Path) -> Result<Vec<f64>> {
    read_column(path)?
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("{}:{}: not a finite number: '{s}'", path.display(), i + 1))
        })
        .collect()
}

fn labels01(path: &Path) -> Result<Vec<bool>> {
    read_column(path)?
        .iter()
        .enumerate()
        .map(|(i, s)| match s.as_str() {
            "1" | "true" => Ok(true),
            "0" | "false" => Ok(false),
            _ => bail!("{}:{}: expected 0 or 1, got '{s}'", path.display(), i + 1),
        })
        .collect()
}

pub fn stats(op: StatOp, x: &Path, y: &Path) -> Result<()> {
    let value = match op {
        StatOp::Pearson => json!({ "pearson": kernel::pearson(&numbers(x)?, &numbers(y)?)? }),
        StatOp::Spearman => json!({ "spearman": kernel::spearman(&numbers(x)?, &numbers(y)?)? }),
        StatOp::Auc => json!({ "auc": kernel::roc_auc(&numbers(x)?, &labels01(y)?)? }),
        StatOp::Accuracy => json!({ "accuracy": kernel::accuracy(&read_column(x)?, &read_column(y)?)? }),
        StatOp::WeightedMean => json!({ "weighted_mean": kernel::weighted_mean(&numbers(x)?, &numbers(y)?)? }),
        StatOp::Wilcoxon => {
            let t = kernel::wilcoxon_signed_rank(&numbers(x)?, &numbers(y)?)?;
            json!({ "n": t.n, "w_plus": t.w_plus, "p_value": t.p_value, "exact": t.exact })
        }
    };
    emit(&value)
}

pub fn profile(corpus: &CorpusArgs, vocabulary: Option<&Path>, cased: bool) -> Result<()> {
    let corpus = load(corpus)?;
    let mut out = json!({ "length": length_profile(&corpus)? });
    if let Some(path) = vocabulary {
        let vocab = Vocabulary::from_file(path, !cased)?;
        out["vocabulary_size"] = json!(vocab.len());
        out["cleanliness"] = serde_json::to_value(cleanliness_report(&corpus, &vocab)?)?;
    }
    emit(&out)
}
