//! Synthetic annotation campaigns with planted ground truth.
//!
//! Each argument gets a planted quality `k / J` (J = judgments per item) and
//! a planted stance. The J quality slots of an argument hold exactly `k`
//! intended 'yes' answers in random order; a faithful annotator with
//! reliability p reports its slot's intent with probability p and otherwise
//! answers 'yes' with probability equal to the planted quality. Every
//! faithful quality answer is therefore 'yes' with probability equal to the
//! planted quality, and p = 1 reproduces the planted score exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{Answer, Argument, ArgumentPair, Channel, Judgment, Motion, Polarity, Stance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnnotatorKind {
    /// Correct with the given probability on stance and pair questions.
    Faithful(f64),
    /// Uniformly random answers everywhere.
    SpammerRandom,
    /// Always 'yes' on quality, 'pro' on stance and 'A' on pairs.
    SpammerYes,
}

impl fmt::Display for AnnotatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnotatorKind::Faithful(p) => write!(f, "faithful:{p}"),
            AnnotatorKind::SpammerRandom => f.write_str("spammer_random"),
            AnnotatorKind::SpammerYes => f.write_str("spammer_yes"),
        }
    }
}

impl FromStr for AnnotatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spammer_random" => Ok(AnnotatorKind::SpammerRandom),
            "spammer_yes" => Ok(AnnotatorKind::SpammerYes),
            _ => s
                .strip_prefix("faithful:")
                .and_then(|p| p.parse::<f64>().ok())
                .map(AnnotatorKind::Faithful)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown annotator kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityPrior {
    /// Yes-count uniform over 0..=J.
    UniformGrid,
    /// Every argument is either all-no or all-yes.
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPlan {
    None,
    /// Every unordered argument pair within each motion.
    All,
    /// This many distinct random pairs per motion (capped at all pairs).
    PerMotion(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_motions: usize,
    pub n_args_per_motion: usize,
    pub annotators: Vec<AnnotatorKind>,
    pub judgments_per_item: usize,
    /// Share of stance and pair judgments that carry a gold answer.
    pub test_question_rate: f64,
    pub quality_prior: QualityPrior,
    pub pairs: PairPlan,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub seed: u64,
}

impl SimConfig {
    /// `n_faithful` annotators of reliability `p` followed by the spammers.
    pub fn mixed(n_faithful: usize, p: f64, n_random: usize, n_yes: usize) -> Self {
        let mut annotators = vec![AnnotatorKind::Faithful(p); n_faithful];
        annotators.extend(std::iter::repeat(AnnotatorKind::SpammerRandom).take(n_random));
        annotators.extend(std::iter::repeat(AnnotatorKind::SpammerYes).take(n_yes));
        SimConfig {
            annotators,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_motions == 0 || self.n_args_per_motion == 0 || self.judgments_per_item == 0 {
            return bad("motion, argument and judgment counts must be at least 1".into());
        }
        if self.annotators.len() < self.judgments_per_item {
            return bad(format!(
                "{} judgments per item need at least that many annotators, got {}",
                self.judgments_per_item,
                self.annotators.len()
            ));
        }
        if !(0.0..=1.0).contains(&self.test_question_rate) {
            return bad("test_question_rate must lie in [0,1]".into());
        }
        if let Some(p) = self.annotators.iter().find_map(|a| match a {
            AnnotatorKind::Faithful(p) if !(0.0..=1.0).contains(p) => Some(*p),
            _ => None,
        }) {
            return bad(format!("faithful reliability {p} outside [0,1]"));
        }
        if self.min_tokens == 0 || self.min_tokens > self.max_tokens {
            return bad("token bounds must satisfy 1 <= min <= max".into());
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_motions: 4,
            n_args_per_motion: 50,
            annotators: vec![AnnotatorKind::Faithful(0.9); 15],
            judgments_per_item: 11,
            test_question_rate: 1.0,
            quality_prior: QualityPrior::UniformGrid,
            pairs: PairPlan::None,
            min_tokens: 8,
            max_tokens: 36,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTruth {
    pub argument_id: String,
    pub true_quality: f64,
    pub true_stance: Stance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorRecord {
    pub annotator_id: String,
    pub kind: String,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub motions: Vec<Motion>,
    pub arguments: Vec<Argument>,
    pub pairs: Vec<ArgumentPair>,
    /// Stance and quality judgments.
    pub individual_judgments: Vec<Judgment>,
    pub pair_judgments: Vec<Judgment>,
    pub truth: Vec<PlantedTruth>,
    pub annotators: BTreeMap<String, AnnotatorKind>,
}

impl Simulation {
    pub fn individual_corpus(&self) -> Result<Corpus> {
        Corpus::new(
            self.motions.clone(),
            self.arguments.clone(),
            Vec::new(),
            self.individual_judgments.clone(),
        )
    }

    pub fn pairs_corpus(&self) -> Result<Corpus> {
        Corpus::new(
            self.motions.clone(),
            self.arguments.clone(),
            self.pairs.clone(),
            self.pair_judgments.clone(),
        )
    }

    pub fn annotator_records(&self) -> Vec<AnnotatorRecord> {
        self.annotators
            .iter()
            .map(|(id, kind)| AnnotatorRecord {
                annotator_id: id.clone(),
                kind: kind.to_string(),
            })
            .collect()
    }

    pub fn true_quality(&self) -> BTreeMap<&str, f64> {
        self.truth
            .iter()
            .map(|t| (t.argument_id.as_str(), t.true_quality))
            .collect()
    }
}

const SUBJECTS: &[&str] = &["this policy", "the proposal", "such a rule", "the change", "this approach"];
const VERBS: &[&str] = &["protects", "harms", "helps", "burdens", "empowers", "limits"];
const OBJECTS: &[&str] = &["ordinary citizens", "young people", "small businesses", "public health", "local communities"];
const FILLER: &[&str] = &[
    "because", "it", "gives", "people", "more", "choice", "and", "reduces", "long", "term", "costs",
    "for", "everyone", "while", "keeping", "the", "system", "fair", "and", "safe",
];

/// Template sentence of exactly `tokens` whitespace tokens.
fn argument_text(rng: &mut impl Rng, tokens: usize) -> String {
    let mut words: Vec<&str> = Vec::with_capacity(tokens + 4);
    words.extend(SUBJECTS.choose(rng).unwrap().split(' '));
    words.push(VERBS.choose(rng).unwrap());
    words.extend(OBJECTS.choose(rng).unwrap().split(' '));
    let offset = rng.gen_range(0..FILLER.len());
    let mut i = 0;
    while words.len() < tokens {
        words.push(FILLER[(offset + i) % FILLER.len()]);
        i += 1;
    }
    words.truncate(tokens);
    words.join(" ")
}

fn flip_unless(rng: &mut impl Rng, p: f64, correct: Answer, wrong: Answer) -> Answer {
    if rng.gen_bool(p) {
        correct
    } else {
        wrong
    }
}

fn coin(rng: &mut impl Rng, heads: Answer, tails: Answer) -> Answer {
    if rng.gen_bool(0.5) {
        heads
    } else {
        tails
    }
}

pub fn simulate(config: &SimConfig) -> Result<Simulation> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let j_per = config.judgments_per_item;
    let annotator_ids: Vec<String> = (0..config.annotators.len()).map(|i| format!("ann{i:03}")).collect();

    let mut motions = Vec::new();
    let mut arguments = Vec::new();
    let mut truth = Vec::new();
    for m in 0..config.n_motions {
        let concept = format!("concept-{:02}", m / 2);
        let polarity = if m % 2 == 0 { Polarity::ProPolicy } else { Polarity::ConPolicy };
        let verb = if polarity == Polarity::ProPolicy { "promote" } else { "limit" };
        let motion_id = format!("m{m:02}");
        motions.push(Motion {
            motion_id: motion_id.clone(),
            text: format!("We should {verb} {concept}"),
            concept,
            polarity,
        });
        for a in 0..config.n_args_per_motion {
            let tokens = rng.gen_range(config.min_tokens..=config.max_tokens);
            let stance = if rng.gen_bool(0.5) { Stance::Pro } else { Stance::Con };
            let yes = match config.quality_prior {
                QualityPrior::UniformGrid => rng.gen_range(0..=j_per),
                QualityPrior::Binary => {
                    if rng.gen_bool(0.5) {
                        j_per
                    } else {
                        0
                    }
                }
            };
            let argument_id = format!("{motion_id}-a{a:03}");
            arguments.push(Argument::new(&argument_id, &motion_id, argument_text(&mut rng, tokens), Some(stance)));
            truth.push(PlantedTruth {
                argument_id,
                true_quality: yes as f64 / j_per as f64,
                true_stance: stance,
            });
        }
    }

    let mut individual_judgments = Vec::new();
    for t in &truth {
        let yes = (t.true_quality * j_per as f64).round() as usize;
        let mut intents: Vec<bool> = (0..j_per).map(|s| s < yes).collect();
        intents.shuffle(&mut rng);
        let chosen = index::sample(&mut rng, annotator_ids.len(), j_per);
        for (slot, ann) in chosen.into_iter().enumerate() {
            let true_stance = Answer::from(t.true_stance);
            let wrong_stance = Answer::from(t.true_stance.opposite());
            let (stance, quality) = match config.annotators[ann] {
                AnnotatorKind::Faithful(p) => {
                    let stance = flip_unless(&mut rng, p, true_stance, wrong_stance);
                    let yes = if rng.gen_bool(p) { intents[slot] } else { rng.gen_bool(t.true_quality) };
                    (stance, if yes { Answer::Yes } else { Answer::No })
                }
                AnnotatorKind::SpammerRandom => (
                    coin(&mut rng, Answer::Pro, Answer::Con),
                    coin(&mut rng, Answer::Yes, Answer::No),
                ),
                AnnotatorKind::SpammerYes => (Answer::Pro, Answer::Yes),
            };
            let gold = rng.gen_bool(config.test_question_rate).then_some(true_stance);
            individual_judgments.push(Judgment {
                annotator_id: annotator_ids[ann].clone(),
                item_id: t.argument_id.clone(),
                channel: Channel::Stance,
                answer: stance,
                gold,
            });
            individual_judgments.push(Judgment {
                annotator_id: annotator_ids[ann].clone(),
                item_id: t.argument_id.clone(),
                channel: Channel::Quality,
                answer: quality,
                gold: None,
            });
        }
    }

    let mut pairs = Vec::new();
    let mut pair_judgments = Vec::new();
    if config.pairs != PairPlan::None {
        let quality: BTreeMap<&str, f64> = truth.iter().map(|t| (t.argument_id.as_str(), t.true_quality)).collect();
        for chunk in arguments.chunks(config.n_args_per_motion) {
            let mut all: Vec<(usize, usize)> = Vec::new();
            for i in 0..chunk.len() {
                for j in i + 1..chunk.len() {
                    all.push((i, j));
                }
            }
            let picked: Vec<(usize, usize)> = match config.pairs {
                PairPlan::PerMotion(n) if n < all.len() => {
                    let mut idx = index::sample(&mut rng, all.len(), n).into_vec();
                    idx.sort_unstable();
                    idx.into_iter().map(|k| all[k]).collect()
                }
                _ => all,
            };
            for (i, j) in picked {
                let (a, b) = if rng.gen_bool(0.5) { (&chunk[i], &chunk[j]) } else { (&chunk[j], &chunk[i]) };
                let pair_id = format!("{}__{}", a.argument_id, b.argument_id);
                let (qa, qb) = (quality[a.argument_id.as_str()], quality[b.argument_id.as_str()]);
                let correct = match qa.partial_cmp(&qb) {
                    Some(std::cmp::Ordering::Greater) => Some(Answer::A),
                    Some(std::cmp::Ordering::Less) => Some(Answer::B),
                    _ => None,
                };
                for ann in index::sample(&mut rng, annotator_ids.len(), j_per) {
                    let answer = match (config.annotators[ann], correct) {
                        (AnnotatorKind::Faithful(p), Some(c)) => {
                            let wrong = if c == Answer::A { Answer::B } else { Answer::A };
                            flip_unless(&mut rng, p, c, wrong)
                        }
                        (AnnotatorKind::SpammerYes, _) => Answer::A,
                        _ => coin(&mut rng, Answer::A, Answer::B),
                    };
                    let gold = match correct {
                        Some(c) if rng.gen_bool(config.test_question_rate) => Some(c),
                        _ => None,
                    };
                    pair_judgments.push(Judgment {
                        annotator_id: annotator_ids[ann].clone(),
                        item_id: pair_id.clone(),
                        channel: Channel::PairWinner,
                        answer,
                        gold,
                    });
                }
                pairs.push(ArgumentPair {
                    pair_id,
                    motion_id: a.motion_id.clone(),
                    arg_a: a.argument_id.clone(),
                    arg_b: b.argument_id.clone(),
                });
            }
        }
    }

    Ok(Simulation {
        motions,
        arguments,
        pairs,
        individual_judgments,
        pair_judgments,
        truth,
        annotators: annotator_ids.into_iter().zip(config.annotators.iter().copied()).collect(),
    })
}
