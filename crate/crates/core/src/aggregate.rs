//! Scores arguments and labels pairs from valid judgments, and samples
//! candidate pairs for pairwise annotation.

use std::collections::{BTreeMap, HashMap};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{Answer, ArgumentPair, Channel, LabeledPair, ScoredArgument, Stance};

/// Absorbs representation error when comparing differences of vote fractions
/// against decimal thresholds.
pub const THRESHOLD_EPS: f64 = 1e-9;

fn check_mask(corpus: &Corpus, mask: &[bool]) -> Result<()> {
    if mask.len() != corpus.judgments().len() {
        return Err(Error::LengthMismatch {
            left: mask.len(),
            right: corpus.judgments().len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub arguments: Vec<ScoredArgument>,
    /// Arguments without any valid quality judgment.
    pub excluded: Vec<String>,
}

/// Per argument: share of valid 'yes' quality answers, plus the majority
/// stance and its share among valid stance answers.
pub fn score_arguments(corpus: &Corpus, mask: &[bool]) -> Result<Scored> {
    check_mask(corpus, mask)?;
    #[derive(Default)]
    struct Tally {
        yes: usize,
        quality: usize,
        pro: usize,
        con: usize,
    }
    let mut tallies: HashMap<&str, Tally> = HashMap::new();
    for (j, _) in corpus.judgments().iter().zip(mask).filter(|(_, &m)| m) {
        let t = tallies.entry(&j.item_id).or_default();
        match (j.channel, j.answer) {
            (Channel::Quality, a) => {
                t.quality += 1;
                t.yes += usize::from(a == Answer::Yes);
            }
            (Channel::Stance, Answer::Pro) => t.pro += 1,
            (Channel::Stance, _) => t.con += 1,
            (Channel::PairWinner, _) => {}
        }
    }
    let mut out = Scored::default();
    for a in corpus.arguments() {
        let Some(t) = tallies.get(a.argument_id.as_str()).filter(|t| t.quality > 0) else {
            out.excluded.push(a.argument_id.clone());
            continue;
        };
        let stances = t.pro + t.con;
        let stance_majority = match t.pro.cmp(&t.con) {
            std::cmp::Ordering::Greater => Some(Stance::Pro),
            std::cmp::Ordering::Less => Some(Stance::Con),
            std::cmp::Ordering::Equal => None,
        };
        out.arguments.push(ScoredArgument {
            argument_id: a.argument_id.clone(),
            quality_score: t.yes as f64 / t.quality as f64,
            n_valid_quality: t.quality,
            stance_majority,
            stance_agreement: if stances == 0 {
                0.0
            } else {
                t.pro.max(t.con) as f64 / stances as f64
            },
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Labeled {
    pub pairs: Vec<LabeledPair>,
    /// Pairs without any valid judgment.
    pub excluded: Vec<String>,
}

/// Majority winner, A-share and agreement from the valid pair judgments.
pub fn label_pairs(corpus: &Corpus, mask: &[bool]) -> Result<Labeled> {
    check_mask(corpus, mask)?;
    let mut votes: HashMap<&str, (usize, usize)> = HashMap::new();
    for (j, _) in corpus
        .judgments()
        .iter()
        .zip(mask)
        .filter(|(j, &m)| m && j.channel == Channel::PairWinner)
    {
        let v = votes.entry(&j.item_id).or_default();
        v.0 += usize::from(j.answer == Answer::A);
        v.1 += 1;
    }
    let mut out = Labeled::default();
    for p in corpus.pairs() {
        match votes.get(p.pair_id.as_str()) {
            Some(&(a, n)) if n > 0 => out.pairs.push(LabeledPair::from_votes(p.pair_id.as_str(), a, n)),
            _ => out.excluded.push(p.pair_id.clone()),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectConfig {
    pub stance_agreement_min: f64,
    pub score_diff_min: f64,
    pub length_diff_max: f64,
    pub budget: usize,
    /// Cap on pairs drawn from any single motion; `None` samples uniformly
    /// over the whole candidate set.
    pub per_motion_quota: Option<usize>,
    pub seed: u64,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            stance_agreement_min: 0.8,
            score_diff_min: 0.2,
            length_diff_max: 0.2,
            budget: 14_000,
            per_motion_quota: None,
            seed: 0,
        }
    }
}

/// Relative token-count difference against the longer argument.
pub fn relative_length_diff(len_a: usize, len_b: usize) -> f64 {
    let longer = len_a.max(len_b);
    if longer == 0 {
        return 0.0;
    }
    len_a.abs_diff(len_b) as f64 / longer as f64
}

/// The three eligibility predicates for a same-motion candidate pair.
pub fn pair_is_eligible(
    a: &ScoredArgument,
    len_a: usize,
    b: &ScoredArgument,
    len_b: usize,
    config: &SelectConfig,
) -> bool {
    let same_stance = a.stance_majority.is_some() && a.stance_majority == b.stance_majority;
    same_stance
        && a.stance_agreement >= config.stance_agreement_min - THRESHOLD_EPS
        && b.stance_agreement >= config.stance_agreement_min - THRESHOLD_EPS
        && (a.quality_score - b.quality_score).abs() >= config.score_diff_min - THRESHOLD_EPS
        && relative_length_diff(len_a, len_b) <= config.length_diff_max + THRESHOLD_EPS
}

/// Seeded uniform sample of eligible same-motion pairs. Pair orientation
/// (which argument is A) is also randomized.
pub fn select_pairs(
    scored: &[ScoredArgument],
    corpus: &Corpus,
    config: &SelectConfig,
) -> Result<Vec<ArgumentPair>> {
    let mut by_motion: BTreeMap<&str, Vec<(&ScoredArgument, usize)>> = BTreeMap::new();
    for s in scored {
        let arg = corpus.argument(&s.argument_id).ok_or_else(|| Error::DanglingReference {
            kind: "argument",
            id: s.argument_id.clone(),
        })?;
        by_motion
            .entry(&arg.motion_id)
            .or_default()
            .push((s, arg.token_count));
    }

    let mut candidates: Vec<(&str, &str, &str)> = Vec::new();
    for (motion, args) in &mut by_motion {
        args.sort_by(|x, y| x.0.argument_id.cmp(&y.0.argument_id));
        for i in 0..args.len() {
            for j in i + 1..args.len() {
                let ((a, la), (b, lb)) = (args[i], args[j]);
                if pair_is_eligible(a, la, b, lb, config) {
                    candidates.push((motion, &a.argument_id, &b.argument_id));
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut chosen: Vec<usize> = match config.per_motion_quota {
        None => {
            let k = config.budget.min(candidates.len());
            index::sample(&mut rng, candidates.len(), k).into_vec()
        }
        Some(quota) => {
            let mut picked = Vec::new();
            let mut start = 0;
            while start < candidates.len() {
                let motion = candidates[start].0;
                let end = start + candidates[start..].iter().take_while(|c| c.0 == motion).count();
                let k = quota.min(end - start);
                picked.extend(index::sample(&mut rng, end - start, k).into_iter().map(|i| start + i));
                start = end;
            }
            if picked.len() > config.budget {
                let keep = index::sample(&mut rng, picked.len(), config.budget);
                picked = keep.into_iter().map(|i| picked[i]).collect();
            }
            picked
        }
    };
    chosen.sort_unstable();

    Ok(chosen
        .into_iter()
        .map(|i| {
            let (motion, x, y) = candidates[i];
            let (a, b) = if rng.gen::<bool>() { (x, y) } else { (y, x) };
            ArgumentPair {
                pair_id: format!("{a}__{b}"),
                motion_id: motion.to_string(),
                arg_a: a.to_string(),
                arg_b: b.to_string(),
            }
        })
        .collect())
}
