//! Annotator filtering and item validity rules.
//!
//! One ordered pass: test-question failures, then (individual task only) a
//! high 'yes' prior, then Annotator-kappa recomputed on the survivors, and
//! finally item-level rules on what is left.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::agreement::{annotator_kappas, pairwise_kappas, task_average_kappa_for, KappaConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{Answer, AnnotatorProfile, Channel, Judgment, LabeledPair, Verdict, Winner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Individual,
    Pairs,
}

impl Task {
    /// Channel carrying test questions and the kappa used for filtering.
    pub fn control_channel(self) -> Channel {
        match self {
            Task::Individual => Channel::Stance,
            Task::Pairs => Channel::PairWinner,
        }
    }

    /// Channel whose valid judgments count toward item validity.
    pub fn label_channel(self) -> Channel {
        match self {
            Task::Individual => Channel::Quality,
            Task::Pairs => Channel::PairWinner,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanseConfig {
    pub task: Task,
    /// Remove annotators failing at least this share of test questions.
    pub test_fail_threshold: f64,
    /// Remove annotators whose defined Annotator-kappa is at most this.
    pub kappa_threshold: f64,
    /// Individual task: remove annotators answering 'yes' at least this often.
    pub yes_prior_threshold: Option<f64>,
    /// Individual task: arguments need this many valid quality judgments.
    pub min_valid_judgments: usize,
    /// Pairs task: pairs need at least this winner agreement.
    pub pair_agreement_threshold: f64,
    pub kappa: KappaConfig,
    /// Repeat the kappa step until no further annotator is removed.
    pub iterate_kappa: bool,
}

impl CleanseConfig {
    pub fn individual() -> Self {
        CleanseConfig {
            task: Task::Individual,
            test_fail_threshold: 0.20,
            kappa_threshold: 0.35,
            yes_prior_threshold: Some(0.80),
            min_valid_judgments: 7,
            pair_agreement_threshold: 0.70,
            kappa: KappaConfig::default(),
            iterate_kappa: false,
        }
    }

    pub fn pairs() -> Self {
        CleanseConfig {
            task: Task::Pairs,
            test_fail_threshold: 0.30,
            kappa_threshold: 0.15,
            yes_prior_threshold: None,
            min_valid_judgments: 1,
            pair_agreement_threshold: 0.70,
            kappa: KappaConfig::default(),
            iterate_kappa: false,
        }
    }

    pub fn for_task(task: Task) -> Self {
        match task {
            Task::Individual => Self::individual(),
            Task::Pairs => Self::pairs(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kappa.validate()?;
        let fractions = [
            ("test_fail_threshold", Some(self.test_fail_threshold)),
            ("yes_prior_threshold", self.yes_prior_threshold),
            ("pair_agreement_threshold", Some(self.pair_agreement_threshold)),
        ];
        for (name, v) in fractions {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidConfig(format!("{name} must lie in [0,1], got {v}")));
                }
            }
        }
        if !(-1.0..=1.0).contains(&self.kappa_threshold) {
            return Err(Error::InvalidConfig(format!(
                "kappa_threshold must lie in [-1,1], got {}",
                self.kappa_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedJudgments {
    pub removed_test: usize,
    pub removed_prior: usize,
    pub removed_kappa: usize,
    /// Judgments by valid annotators on items dropped by the item rules.
    pub removed_item: usize,
}

impl RemovedJudgments {
    pub fn total(&self) -> usize {
        self.removed_test + self.removed_prior + self.removed_kappa + self.removed_item
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanseReport {
    pub config: CleanseConfig,
    pub annotators: Vec<AnnotatorProfile>,
    pub n_input_judgments: usize,
    pub n_surviving_judgments: usize,
    pub removed: RemovedJudgments,
    pub n_input_items: usize,
    pub n_surviving_items: usize,
    /// Mean valid label-channel judgments per surviving item.
    pub mean_valid_per_item: f64,
    /// Task-Average-kappa over the cleansed judgments, per channel.
    pub task_average_kappa: BTreeMap<Channel, Option<f64>>,
    /// Share of surviving judgments from annotators without a defined Annotator-kappa.
    pub unkappad_judgment_share: f64,
}

impl CleanseReport {
    pub fn verdict_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for p in &self.annotators {
            let key = match p.verdict {
                Verdict::Valid => "valid",
                Verdict::RemovedTest => "removed_test",
                Verdict::RemovedPrior => "removed_prior",
                Verdict::RemovedKappa => "removed_kappa",
            };
            *out.entry(key).or_insert(0) += 1;
        }
        out
    }
}

struct Outcome {
    profiles: BTreeMap<String, AnnotatorProfile>,
    surviving_items: BTreeSet<String>,
    n_input_items: usize,
    mask: Vec<bool>,
}

fn check_task(corpus: &Corpus, task: Task) -> Result<()> {
    let channels = corpus.channels();
    match task {
        Task::Individual if channels.contains(&Channel::PairWinner) => Err(Error::ConfigMismatch(
            "individual task given pair_winner judgments".into(),
        )),
        Task::Individual if !channels.contains(&Channel::Quality) => Err(Error::ConfigMismatch(
            "individual task needs quality judgments".into(),
        )),
        Task::Pairs if channels.iter().any(|c| *c != Channel::PairWinner) => Err(
            Error::ConfigMismatch("pairs task given stance or quality judgments".into()),
        ),
        Task::Pairs if channels.is_empty() => Err(Error::ConfigMismatch(
            "pairs task needs pair_winner judgments".into(),
        )),
        _ => Ok(()),
    }
}

fn base_profiles(judgments: &[Judgment], task: Task) -> BTreeMap<String, AnnotatorProfile> {
    #[derive(Default)]
    struct Tally {
        n: usize,
        tests: usize,
        failed: usize,
        quality: usize,
        yes: usize,
    }
    let control = task.control_channel();
    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();
    for j in judgments {
        let t = tallies.entry(&j.annotator_id).or_default();
        t.n += 1;
        if j.channel == control {
            if let Some(failed) = j.failed_test() {
                t.tests += 1;
                t.failed += usize::from(failed);
            }
        }
        if j.channel == Channel::Quality {
            t.quality += 1;
            t.yes += usize::from(j.answer == Answer::Yes);
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    tallies
        .into_iter()
        .map(|(id, t)| {
            (
                id.to_string(),
                AnnotatorProfile {
                    annotator_id: id.to_string(),
                    n_judgments: t.n,
                    n_test_questions: t.tests,
                    test_failure_rate: ratio(t.failed, t.tests),
                    yes_prior: ratio(t.yes, t.quality),
                    annotator_kappa: None,
                    n_pairwise_kappas: 0,
                    verdict: Verdict::Valid,
                },
            )
        })
        .collect()
}

fn run(corpus: &Corpus, config: &CleanseConfig) -> Result<Outcome> {
    config.validate()?;
    check_task(corpus, config.task)?;
    let judgments = corpus.judgments();
    let mut profiles = base_profiles(judgments, config.task);

    for p in profiles.values_mut() {
        if p.n_test_questions > 0 && p.test_failure_rate >= config.test_fail_threshold {
            p.verdict = Verdict::RemovedTest;
        }
    }
    if config.task == Task::Individual {
        if let Some(limit) = config.yes_prior_threshold {
            for p in profiles.values_mut() {
                if p.verdict == Verdict::Valid && p.yes_prior >= limit {
                    p.verdict = Verdict::RemovedPrior;
                }
            }
        }
    }

    let control = config.task.control_channel();
    loop {
        let survivors = judgments
            .iter()
            .filter(|j| profiles[&j.annotator_id].verdict == Verdict::Valid);
        let pairwise = pairwise_kappas(survivors, control, &config.kappa);
        let kappas = annotator_kappas(&pairwise, &config.kappa);
        let mut removed_any = false;
        for p in profiles.values_mut().filter(|p| p.verdict == Verdict::Valid) {
            let k = kappas.get(&p.annotator_id);
            p.annotator_kappa = k.and_then(|k| k.kappa);
            p.n_pairwise_kappas = k.map_or(0, |k| k.n_pairwise);
            if p.annotator_kappa.is_some_and(|k| k <= config.kappa_threshold) {
                p.verdict = Verdict::RemovedKappa;
                removed_any = true;
            }
        }
        if !config.iterate_kappa || !removed_any {
            break;
        }
    }

    let valid = |j: &Judgment| profiles[&j.annotator_id].verdict == Verdict::Valid;
    let (n_input_items, surviving_items): (usize, BTreeSet<String>) = match config.task {
        Task::Individual => {
            let mut counts: HashMap<&str, usize> = HashMap::new();
            for j in judgments.iter().filter(|j| j.channel == Channel::Quality && valid(j)) {
                *counts.entry(&j.item_id).or_default() += 1;
            }
            let keep = corpus
                .arguments()
                .iter()
                .filter(|a| {
                    counts.get(a.argument_id.as_str()).copied().unwrap_or(0)
                        >= config.min_valid_judgments.max(1)
                })
                .map(|a| a.argument_id.clone())
                .collect();
            (corpus.arguments().len(), keep)
        }
        Task::Pairs => {
            let mut votes: HashMap<&str, (usize, usize)> = HashMap::new();
            for j in judgments.iter().filter(|j| valid(j)) {
                let v = votes.entry(&j.item_id).or_default();
                v.0 += usize::from(j.answer == Answer::A);
                v.1 += 1;
            }
            let keep = corpus
                .pairs()
                .iter()
                .filter(|p| match votes.get(p.pair_id.as_str()) {
                    Some(&(a, n)) if n > 0 => {
                        let label = LabeledPair::from_votes(p.pair_id.as_str(), a, n);
                        label.winner != Winner::Tie
                            && label.agreement >= config.pair_agreement_threshold
                    }
                    _ => false,
                })
                .map(|p| p.pair_id.clone())
                .collect();
            (corpus.pairs().len(), keep)
        }
    };

    let mask = judgments
        .iter()
        .map(|j| valid(j) && surviving_items.contains(&j.item_id))
        .collect();
    Ok(Outcome {
        profiles,
        surviving_items,
        n_input_items,
        mask,
    })
}

/// Per-judgment validity under `config`, aligned with `corpus.judgments()`.
pub fn validity_mask(corpus: &Corpus, config: &CleanseConfig) -> Result<Vec<bool>> {
    run(corpus, config).map(|o| o.mask)
}

/// Applies the cascade and returns the cleansed corpus with its report.
pub fn cleanse(corpus: &Corpus, config: &CleanseConfig) -> Result<(Corpus, CleanseReport)> {
    let outcome = run(corpus, config)?;
    let judgments = corpus.judgments();

    let mut removed = RemovedJudgments::default();
    for (j, &keep) in judgments.iter().zip(&outcome.mask) {
        if keep {
            continue;
        }
        match outcome.profiles[&j.annotator_id].verdict {
            Verdict::RemovedTest => removed.removed_test += 1,
            Verdict::RemovedPrior => removed.removed_prior += 1,
            Verdict::RemovedKappa => removed.removed_kappa += 1,
            Verdict::Valid => removed.removed_item += 1,
        }
    }

    let kept: Vec<Judgment> = judgments
        .iter()
        .zip(&outcome.mask)
        .filter(|(_, &m)| m)
        .map(|(j, _)| j.clone())
        .collect();

    let (arguments, pairs) = match config.task {
        Task::Individual => {
            let arguments: Vec<_> = corpus
                .arguments()
                .iter()
                .filter(|a| outcome.surviving_items.contains(&a.argument_id))
                .cloned()
                .collect();
            let pairs = corpus
                .pairs()
                .iter()
                .filter(|p| {
                    outcome.surviving_items.contains(&p.arg_a)
                        && outcome.surviving_items.contains(&p.arg_b)
                })
                .cloned()
                .collect();
            (arguments, pairs)
        }
        Task::Pairs => (
            corpus.arguments().to_vec(),
            corpus
                .pairs()
                .iter()
                .filter(|p| outcome.surviving_items.contains(&p.pair_id))
                .cloned()
                .collect(),
        ),
    };
    let cleansed = corpus.rebuild(arguments, pairs, kept)?;

    let label = config.task.label_channel();
    let n_label = cleansed.judgments().iter().filter(|j| j.channel == label).count();
    let n_items = outcome.surviving_items.len();
    let mut task_average_kappa = BTreeMap::new();
    for channel in [Channel::Stance, Channel::Quality, Channel::PairWinner] {
        if cleansed.judgments().iter().any(|j| j.channel == channel) {
            task_average_kappa.insert(
                channel,
                task_average_kappa_for(cleansed.judgments(), channel, &config.kappa).ok(),
            );
        }
    }
    let unkappad = cleansed
        .judgments()
        .iter()
        .filter(|j| outcome.profiles[&j.annotator_id].annotator_kappa.is_none())
        .count();

    let report = CleanseReport {
        config: config.clone(),
        annotators: outcome.profiles.into_values().collect(),
        n_input_judgments: judgments.len(),
        n_surviving_judgments: cleansed.judgments().len(),
        removed,
        n_input_items: outcome.n_input_items,
        n_surviving_items: n_items,
        mean_valid_per_item: if n_items == 0 {
            0.0
        } else {
            n_label as f64 / n_items as f64
        },
        task_average_kappa,
        unkappad_judgment_share: if cleansed.judgments().is_empty() {
            0.0
        } else {
            unkappad as f64 / cleansed.judgments().len() as f64
        },
    };
    debug_assert_eq!(
        report.removed.total() + report.n_surviving_judgments,
        report.n_input_judgments
    );
    Ok((cleansed, report))
}
