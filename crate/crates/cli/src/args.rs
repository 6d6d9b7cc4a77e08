//! Shared flag groups. Every tunable can come from a TOML file given with
//! `--config`; a flag on the command line wins over the file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use argq_core::agreement::KappaConfig;
use argq_core::aggregate::SelectConfig;
use argq_core::cleanse::{CleanseConfig, Task};
use argq_core::ingest::CorpusPaths;
use argq_core::simulate::{AnnotatorKind, PairPlan, QualityPrior, SimConfig};
use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    /// Directory holding arguments.jsonl, motions.tsv and, when present, pairs.jsonl and judgments.jsonl
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Arguments file (overrides the one in --data)
    #[arg(long)]
    pub arguments: Option<PathBuf>,
    /// Motions file (overrides the one in --data)
    #[arg(long)]
    pub motions: Option<PathBuf>,
    /// Pairs file (overrides the one in --data)
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Judgments file; repeat to concatenate several (overrides the one in --data)
    #[arg(long)]
    pub judgments: Vec<PathBuf>,
}

impl CorpusArgs {
    pub fn paths(&self) -> Result<CorpusPaths> {
        let mut paths = match &self.data {
            Some(dir) => CorpusPaths::in_dir(dir),
            None => CorpusPaths::default(),
        };
        if let Some(p) = &self.arguments {
            paths.arguments = p.clone();
        }
        if let Some(p) = &self.motions {
            paths.motions = p.clone();
        }
        if self.pairs.is_some() {
            paths.pairs = self.pairs.clone();
        }
        if !self.judgments.is_empty() {
            paths.judgments = self.judgments.clone();
        }
        if paths.arguments.as_os_str().is_empty() || paths.motions.as_os_str().is_empty() {
            bail!("no corpus given: pass --data or both --arguments and --motions");
        }
        Ok(paths)
    }
}

pub fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e.message()))
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CleanseFlags {
    /// Remove annotators failing at least this share of test questions [individual 0.20, pairs 0.30]
    #[arg(long)]
    pub test_fail_threshold: Option<f64>,
    /// Remove annotators whose Annotator-kappa is at most this [individual 0.35, pairs 0.15]
    #[arg(long, allow_negative_numbers = true)]
    pub kappa_threshold: Option<f64>,
    /// Remove annotators answering 'yes' at least this often; individual task only [0.80]
    #[arg(long)]
    pub yes_prior_threshold: Option<f64>,
    /// Arguments need this many valid quality judgments [7]
    #[arg(long)]
    pub min_valid_judgments: Option<usize>,
    /// Pairs need at least this winner agreement [0.70]
    #[arg(long)]
    pub pair_agreement_threshold: Option<f64>,
    /// Shared items two annotators need for a pairwise kappa [50]
    #[arg(long)]
    pub min_common_items: Option<usize>,
    /// Pairwise kappas an annotator needs for an Annotator-kappa [5]
    #[arg(long)]
    pub min_kappa_partners: Option<usize>,
    /// Repeat the kappa filter until no annotator is removed
    #[arg(long)]
    #[serde(default)]
    pub iterate_kappa: bool,
}

impl CleanseFlags {
    pub fn resolve(&self, file: &CleanseFlags, task: Task) -> Result<CleanseConfig> {
        let d = CleanseConfig::for_task(task);
        let kd = KappaConfig::default();
        let cfg = CleanseConfig {
            task,
            test_fail_threshold: self.test_fail_threshold.or(file.test_fail_threshold).unwrap_or(d.test_fail_threshold),
            kappa_threshold: self.kappa_threshold.or(file.kappa_threshold).unwrap_or(d.kappa_threshold),
            yes_prior_threshold: match task {
                Task::Individual => self.yes_prior_threshold.or(file.yes_prior_threshold).or(d.yes_prior_threshold),
                Task::Pairs => {
                    if self.yes_prior_threshold.or(file.yes_prior_threshold).is_some() {
                        bail!("yes_prior_threshold applies to the individual task only");
                    }
                    None
                }
            },
            min_valid_judgments: self.min_valid_judgments.or(file.min_valid_judgments).unwrap_or(d.min_valid_judgments),
            pair_agreement_threshold: self
                .pair_agreement_threshold
                .or(file.pair_agreement_threshold)
                .unwrap_or(d.pair_agreement_threshold),
            kappa: KappaConfig {
                min_common_items: self.min_common_items.or(file.min_common_items).unwrap_or(kd.min_common_items),
                min_kappa_partners: self.min_kappa_partners.or(file.min_kappa_partners).unwrap_or(kd.min_kappa_partners),
            },
            iterate_kappa: self.iterate_kappa || file.iterate_kappa,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SelectFlags {
    /// Both arguments need at least this stance agreement [0.8]
    #[arg(long)]
    pub stance_agreement_min: Option<f64>,
    /// Quality scores must differ by at least this [0.2]
    #[arg(long)]
    pub score_diff_min: Option<f64>,
    /// Relative token-count difference may be at most this [0.2]
    #[arg(long)]
    pub length_diff_max: Option<f64>,
    /// Number of pairs to sample [14000]
    #[arg(long)]
    pub budget: Option<usize>,
    /// Cap on pairs drawn from a single motion (default: uniform over all candidates)
    #[arg(long)]
    pub per_motion_quota: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SelectFlags {
    pub fn resolve(&self, file: &SelectFlags) -> SelectConfig {
        let d = SelectConfig::default();
        SelectConfig {
            stance_agreement_min: self.stance_agreement_min.or(file.stance_agreement_min).unwrap_or(d.stance_agreement_min),
            score_diff_min: self.score_diff_min.or(file.score_diff_min).unwrap_or(d.score_diff_min),
            length_diff_max: self.length_diff_max.or(file.length_diff_max).unwrap_or(d.length_diff_max),
            budget: self.budget.or(file.budget).unwrap_or(d.budget),
            per_motion_quota: self.per_motion_quota.or(file.per_motion_quota),
            seed: self.seed.or(file.seed).unwrap_or(d.seed),
        }
    }
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PriorArg {
    UniformGrid,
    Binary,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SimFlags {
    #[arg(long)]
    pub motions: Option<usize>,
    #[arg(long)]
    pub args_per_motion: Option<usize>,
    /// Number of faithful annotators [15]
    #[arg(long)]
    pub faithful: Option<usize>,
    /// Reliability of the faithful annotators [0.9]
    #[arg(long)]
    pub reliability: Option<f64>,
    /// Number of annotators answering uniformly at random [0]
    #[arg(long)]
    pub spammer_random: Option<usize>,
    /// Number of annotators always answering yes / pro / A [0]
    #[arg(long)]
    pub spammer_yes: Option<usize>,
    /// Explicit annotator list, e.g. faithful:0.9,faithful:0.7,spammer_random (replaces the counts above)
    #[arg(long, value_delimiter = ',')]
    pub annotators: Option<Vec<String>>,
    #[arg(long)]
    pub judgments_per_item: Option<usize>,
    /// Share of stance and pair judgments carrying a gold answer [1.0]
    #[arg(long)]
    pub test_question_rate: Option<f64>,
    #[arg(long, value_enum)]
    pub quality_prior: Option<PriorArg>,
    /// Pairs per motion to annotate: a number, or "all" [none]
    #[arg(long)]
    pub pairs_per_motion: Option<String>,
    #[arg(long)]
    pub min_tokens: Option<usize>,
    #[arg(long)]
    pub max_tokens: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SimFlags {
    pub fn resolve(&self, file: &SimFlags) -> Result<SimConfig> {
        let d = SimConfig::default();
        let annotators = match self.annotators.clone().or_else(|| file.annotators.clone()) {
            Some(list) => list
                .iter()
                .map(|s| s.trim().parse::<AnnotatorKind>())
                .collect::<argq_core::Result<Vec<_>>>()?,
            None => {
                let n = self.faithful.or(file.faithful).unwrap_or(d.annotators.len());
                let p = self.reliability.or(file.reliability).unwrap_or(0.9);
                let mut v = vec![AnnotatorKind::Faithful(p); n];
                v.extend(vec![AnnotatorKind::SpammerRandom; self.spammer_random.or(file.spammer_random).unwrap_or(0)]);
                v.extend(vec![AnnotatorKind::SpammerYes; self.spammer_yes.or(file.spammer_yes).unwrap_or(0)]);
                v
            }
        };
        let pairs = match self.pairs_per_motion.as_deref().or(file.pairs_per_motion.as_deref()) {
            None | Some("0") | Some("none") => PairPlan::None,
            Some("all") => PairPlan::All,
            Some(n) => PairPlan::PerMotion(
                n.parse()
                    .with_context(|| format!("pairs_per_motion must be a count or 'all', got '{n}'"))?,
            ),
        };
        let cfg = SimConfig {
            n_motions: self.motions.or(file.motions).unwrap_or(d.n_motions),
            n_args_per_motion: self.args_per_motion.or(file.args_per_motion).unwrap_or(d.n_args_per_motion),
            annotators,
            judgments_per_item: self.judgments_per_item.or(file.judgments_per_item).unwrap_or(d.judgments_per_item),
            test_question_rate: self.test_question_rate.or(file.test_question_rate).unwrap_or(d.test_question_rate),
            quality_prior: match self.quality_prior.or(file.quality_prior) {
                Some(PriorArg::Binary) => QualityPrior::Binary,
                Some(PriorArg::UniformGrid) => QualityPrior::UniformGrid,
                None => d.quality_prior,
            },
            pairs,
            min_tokens: self.min_tokens.or(file.min_tokens).unwrap_or(d.min_tokens),
            max_tokens: self.max_tokens.or(file.max_tokens).unwrap_or(d.max_tokens),
            seed: self.seed.or(file.seed).unwrap_or(d.seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
