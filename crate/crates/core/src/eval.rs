//! Cross-validation harness: leave-one-group-out folds, the exchange files
//! shared with external models, the token-count baseline, per-fold scoring
//! with size-weighted averages, and paired system comparison.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::ingest::{read_jsonl, write_jsonl};
use crate::model::{FoldReport, LabeledPair, ScoredArgument, Winner};
use crate::stats::{self, WilcoxonTest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldGrouping {
    /// One fold per motion.
    Motion,
    /// One fold per concept, holding out both of its motions.
    Concept,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_id: String,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

/// Leave-one-group-out folds over `(item_id, group_id)` pairs, ordered by
/// group id with item ids sorted inside each split.
pub fn make_folds<'a>(items: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Vec<FoldSplit>> {
    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for (item, group) in items {
        if !seen.insert(item) {
            return Err(Error::Duplicate {
                kind: "fold item",
                id: item.to_string(),
            });
        }
        groups.entry(group).or_default().push(item);
    }
    if groups.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: groups.len(),
        });
    }
    for members in groups.values_mut() {
        members.sort_unstable();
    }
    Ok(groups
        .iter()
        .map(|(&fold, test)| FoldSplit {
            fold_id: fold.to_string(),
            train: seen
                .iter()
                .filter(|i| test.binary_search(i).is_err())
                .map(|i| i.to_string())
                .collect(),
            test: test.iter().map(|i| i.to_string()).collect(),
        })
        .collect())
}

fn group_of<'a>(corpus: &'a Corpus, motion_id: &'a str, grouping: FoldGrouping) -> &'a str {
    match grouping {
        FoldGrouping::Motion => motion_id,
        FoldGrouping::Concept => corpus
            .motion(motion_id)
            .map_or(motion_id, |m| m.concept.as_str()),
    }
}

/// Folds over the corpus pairs.
pub fn pair_folds(corpus: &Corpus, grouping: FoldGrouping) -> Result<Vec<FoldSplit>> {
    make_folds(
        corpus
            .pairs()
            .iter()
            .map(|p| (p.pair_id.as_str(), group_of(corpus, &p.motion_id, grouping))),
    )
}

/// Folds over the corpus arguments.
pub fn argument_folds(corpus: &Corpus, grouping: FoldGrouping) -> Result<Vec<FoldSplit>> {
    make_folds(
        corpus
            .arguments()
            .iter()
            .map(|a| (a.argument_id.as_str(), group_of(corpus, &a.motion_id, grouping))),
    )
}

/// Checks that the test sets are disjoint, cover every item, and that each
/// fold trains on exactly the other folds' test items.
pub fn check_partition(folds: &[FoldSplit]) -> Result<()> {
    let mut all = BTreeSet::new();
    for f in folds {
        for item in &f.test {
            if !all.insert(item.as_str()) {
                return Err(Error::Duplicate {
                    kind: "test item",
                    id: item.clone(),
                });
            }
        }
    }
    for f in folds {
        let test: BTreeSet<&str> = f.test.iter().map(String::as_str).collect();
        let train: BTreeSet<&str> = f.train.iter().map(String::as_str).collect();
        let expected: BTreeSet<&str> = all.difference(&test).copied().collect();
        if train != expected {
            return Err(Error::Invalid(format!(
                "fold '{}' train set is not the complement of its test set",
                f.fold_id
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldRecord {
    pub fold_id: String,
    pub item_id: String,
    pub split: Split,
}

pub fn write_folds(path: &Path, folds: &[FoldSplit]) -> Result<()> {
    write_jsonl(
        path,
        folds.iter().flat_map(|f| {
            let rec = move |item: &String, split| FoldRecord {
                fold_id: f.fold_id.clone(),
                item_id: item.clone(),
                split,
            };
            f.train
                .iter()
                .map(move |i| rec(i, Split::Train))
                .chain(f.test.iter().map(move |i| rec(i, Split::Test)))
        }),
    )
}

/// Reads a folds file, keeping folds and items in file order.
pub fn read_folds(path: &Path) -> Result<Vec<FoldSplit>> {
    let mut folds: Vec<FoldSplit> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    for (line, r) in read_jsonl::<FoldRecord>(path)? {
        if !seen.insert((r.fold_id.clone(), r.item_id.clone())) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("item '{}' repeated in fold '{}'", r.item_id, r.fold_id),
            });
        }
        let idx = *index.entry(r.fold_id.clone()).or_insert_with(|| {
            folds.push(FoldSplit {
                fold_id: r.fold_id.clone(),
                train: Vec::new(),
                test: Vec::new(),
            });
            folds.len() - 1
        });
        match r.split {
            Split::Train => folds[idx].train.push(r.item_id),
            Split::Test => folds[idx].test.push(r.item_id),
        }
    }
    Ok(folds)
}

/// One line of the prediction exchange file: `value` is the probability that
/// A wins for pairs, or a quality score in [0,1] for arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    pub fold_id: String,
    pub item_id: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Predictions {
    values: HashMap<(String, String), f64>,
}

impl Predictions {
    pub fn from_records(records: impl IntoIterator<Item = PredictionRecord>) -> Result<Self> {
        let mut values = HashMap::new();
        for r in records {
            if !(0.0..=1.0).contains(&r.value) {
                return Err(Error::Invalid(format!(
                    "prediction for '{}' in fold '{}' is {}, outside [0,1]",
                    r.item_id, r.fold_id, r.value
                )));
            }
            if values.insert((r.fold_id.clone(), r.item_id.clone()), r.value).is_some() {
                return Err(Error::Duplicate {
                    kind: "prediction",
                    id: format!("{}/{}", r.fold_id, r.item_id),
                });
            }
        }
        Ok(Predictions { values })
    }

    pub fn get(&self, fold_id: &str, item_id: &str) -> Result<f64> {
        self.values
            .get(&(fold_id.to_string(), item_id.to_string()))
            .copied()
            .ok_or_else(|| Error::MissingPrediction {
                fold_id: fold_id.to_string(),
                item_id: item_id.to_string(),
            })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn read_predictions(path: &Path) -> Result<Predictions> {
    let records = read_jsonl::<PredictionRecord>(path)?;
    for (line, r) in &records {
        if !(0.0..=1.0).contains(&r.value) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                msg: format!("value {} outside [0,1]", r.value),
            });
        }
    }
    Predictions::from_records(records.into_iter().map(|(_, r)| r))
}

pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    write_jsonl(path, records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthPrediction {
    pub pair_id: String,
    pub winner: Winner,
    /// Token count of A minus token count of B.
    pub score: i64,
}

/// Predicts the longer argument; equal lengths predict A.
pub fn arg_length_baseline(corpus: &Corpus, pair_ids: &[String]) -> Result<Vec<LengthPrediction>> {
    pair_ids
        .iter()
        .map(|id| {
            let pair = corpus.pair(id).ok_or_else(|| Error::DanglingReference {
                kind: "pair",
                id: id.clone(),
            })?;
            let len = |arg: &str| {
                corpus
                    .argument(arg)
                    .map(|a| a.token_count as i64)
                    .ok_or_else(|| Error::DanglingReference {
                        kind: "argument",
                        id: arg.to_string(),
                    })
            };
            let score = len(&pair.arg_a)? - len(&pair.arg_b)?;
            Ok(LengthPrediction {
                pair_id: id.clone(),
                winner: if score >= 0 { Winner::A } else { Winner::B },
                score,
            })
        })
        .collect()
}

/// Maps a length difference to a probability that A wins, strictly
/// increasing in the difference with 0 mapping to exactly 0.5.
pub fn length_score_to_prob(score: i64) -> f64 {
    0.5 + (score as f64).atan() / std::f64::consts::PI
}

/// Baseline predictions for every test pair of every fold.
pub fn baseline_predictions(corpus: &Corpus, folds: &[FoldSplit]) -> Result<Vec<PredictionRecord>> {
    let mut out = Vec::new();
    for f in folds {
        for p in arg_length_baseline(corpus, &f.test)? {
            out.push(PredictionRecord {
                fold_id: f.fold_id.clone(),
                item_id: p.pair_id,
                value: length_score_to_prob(p.score),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub folds: Vec<FoldReport>,
    /// Per metric, the mean over folds where it is defined, weighted by fold size.
    pub weighted: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl EvalReport {
    /// Per-fold values of `metric` in fold order; folds lacking it are skipped.
    pub fn metric_by_fold(&self, metric: &str) -> BTreeMap<String, f64> {
        self.folds
            .iter()
            .filter_map(|f| f.metrics.get(metric).map(|v| (f.fold_id.clone(), *v)))
            .collect()
    }
}

fn weighted(folds: &[FoldReport]) -> Result<BTreeMap<String, f64>> {
    let names: BTreeSet<&String> = folds.iter().flat_map(|f| f.metrics.keys()).collect();
    names
        .into_iter()
        .map(|name| {
            let (values, weights): (Vec<f64>, Vec<f64>) = folds
                .iter()
                .filter_map(|f| f.metrics.get(name).map(|v| (*v, f.n_instances as f64)))
                .unzip();
            Ok((name.clone(), stats::weighted_mean(&values, &weights)?))
        })
        .collect()
}

type FoldOutcome = Result<(Option<FoldReport>, Vec<String>)>;

fn run_folds(folds: &[FoldSplit], eval: impl Fn(&FoldSplit) -> FoldOutcome + Sync + Send) -> Result<EvalReport> {
    let outcomes: Vec<FoldOutcome> = folds.par_iter().map(eval).collect();
    let mut reports = Vec::new();
    let mut warnings = Vec::new();
    for o in outcomes {
        let (report, w) = o?;
        reports.extend(report);
        warnings.extend(w);
    }
    reports.sort_by(|a, b| a.fold_id.cmp(&b.fold_id));
    if reports.is_empty() {
        return Err(Error::Empty("no fold had gold test items"));
    }
    Ok(EvalReport {
        weighted: weighted(&reports)?,
        folds: reports,
        warnings,
    })
}

/// Accuracy (A predicted iff prob_a >= 0.5) and AUC of prob_a against
/// "winner is A", per fold and size-weighted.
pub fn evaluate_pairs(predictions: &Predictions, gold: &[LabeledPair], folds: &[FoldSplit]) -> Result<EvalReport> {
    let gold: HashMap<&str, Winner> = gold
        .iter()
        .filter(|p| p.winner != Winner::Tie)
        .map(|p| (p.pair_id.as_str(), p.winner))
        .collect();
    run_folds(folds, |f| {
        let mut warnings = Vec::new();
        let mut probs = Vec::new();
        let mut labels = Vec::new();
        for item in &f.test {
            let Some(&w) = gold.get(item.as_str()) else {
                continue;
            };
            probs.push(predictions.get(&f.fold_id, item)?);
            labels.push(w == Winner::A);
        }
        if labels.is_empty() {
            warnings.push(format!("fold '{}' has no gold test pairs; skipped", f.fold_id));
            return Ok((None, warnings));
        }
        let predicted: Vec<bool> = probs.iter().map(|&p| p >= 0.5).collect();
        let mut metrics = BTreeMap::new();
        metrics.insert("accuracy".to_string(), stats::accuracy(&predicted, &labels)?);
        match stats::roc_auc(&probs, &labels) {
            Ok(auc) => {
                metrics.insert("auc".to_string(), auc);
            }
            Err(Error::SingleClass) => warnings.push(format!(
                "fold '{}': gold winners are all one side, AUC undefined",
                f.fold_id
            )),
            Err(e) => return Err(e),
        }
        Ok((
            Some(FoldReport {
                fold_id: f.fold_id.clone(),
                n_instances: labels.len(),
                metrics,
            }),
            warnings,
        ))
    })
}

/// Pearson and Spearman correlation of predicted scores against gold
/// quality scores, per fold and size-weighted.
pub fn evaluate_ranking(
    predictions: &Predictions,
    gold: &[ScoredArgument],
    folds: &[FoldSplit],
) -> Result<EvalReport> {
    let gold: HashMap<&str, f64> = gold
        .iter()
        .map(|s| (s.argument_id.as_str(), s.quality_score))
        .collect();
    run_folds(folds, |f| {
        let mut warnings = Vec::new();
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for item in &f.test {
            let Some(&g) = gold.get(item.as_str()) else {
                continue;
            };
            pred.push(predictions.get(&f.fold_id, item)?);
            truth.push(g);
        }
        if truth.is_empty() {
            warnings.push(format!("fold '{}' has no gold test arguments; skipped", f.fold_id));
            return Ok((None, warnings));
        }
        let mut metrics = BTreeMap::new();
        for (name, value) in [
            ("pearson", stats::pearson(&pred, &truth)),
            ("spearman", stats::spearman(&pred, &truth)),
        ] {
            match value {
                Ok(v) => {
                    metrics.insert(name.to_string(), v);
                }
                Err(Error::ZeroVariance | Error::TooFew { .. }) => warnings.push(format!(
                    "fold '{}': {name} undefined (constant or too few values)",
                    f.fold_id
                )),
                Err(e) => return Err(e),
            }
        }
        Ok((
            Some(FoldReport {
                fold_id: f.fold_id.clone(),
                n_instances: truth.len(),
                metrics,
            }),
            warnings,
        ))
    })
}

/// Two-tailed Wilcoxon signed-rank test on aligned per-fold metrics.
pub fn compare_systems(fold_metrics_a: &[f64], fold_metrics_b: &[f64]) -> Result<WilcoxonTest> {
    stats::wilcoxon_signed_rank(fold_metrics_a, fold_metrics_b)
}

/// Aligns `metric` from two reports by fold id and compares them.
pub fn compare_reports(a: &EvalReport, b: &EvalReport, metric: &str) -> Result<WilcoxonTest> {
    let ma = a.metric_by_fold(metric);
    let mb = b.metric_by_fold(metric);
    if let Some(id) = ma.keys().find(|k| !mb.contains_key(*k)).or_else(|| mb.keys().find(|k| !ma.contains_key(*k))) {
        return Err(Error::IdMismatch(id.clone()));
    }
    let va: Vec<f64> = ma.values().copied().collect();
    let vb: Vec<f64> = mb.values().copied().collect();
    compare_systems(&va, &vb)
}
