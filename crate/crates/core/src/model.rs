//! Domain types shared across the pipeline.
//!
//! Everything here is a plain immutable value. Identifiers are opaque
//! strings because released files mix numeric and textual ids.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub type MotionId = String;
pub type ArgumentId = String;
pub type PairId = String;
pub type AnnotatorId = String;

/// Collection UI bounds on argument length, in whitespace tokens.
pub const MIN_ARGUMENT_TOKENS: usize = 8;
pub const MAX_ARGUMENT_TOKENS: usize = 36;

/// Whitespace token count used everywhere an argument length is needed.
pub fn token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    ProPolicy,
    ConPolicy,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::ProPolicy => "pro_policy",
            Polarity::ConPolicy => "con_policy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pro_policy" => Some(Polarity::ProPolicy),
            "con_policy" => Some(Polarity::ConPolicy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Motion {
    pub motion_id: MotionId,
    pub text: String,
    pub concept: String,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Pro,
    Con,
}

impl Stance {
    pub fn opposite(self) -> Self {
        match self {
            Stance::Pro => Stance::Con,
            Stance::Con => Stance::Pro,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Argument {
    pub argument_id: ArgumentId,
    pub motion_id: MotionId,
    pub text: String,
    /// Whitespace token count of `text`, fixed at construction.
    pub token_count: usize,
    pub gold_stance: Option<Stance>,
}

impl Argument {
    pub fn new(
        argument_id: impl Into<String>,
        motion_id: impl Into<String>,
        text: impl Into<String>,
        gold_stance: Option<Stance>,
    ) -> Self {
        let text = text.into();
        Argument {
            argument_id: argument_id.into(),
            motion_id: motion_id.into(),
            token_count: token_count(&text),
            text,
            gold_stance,
        }
    }
}

/// Which question a judgment answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Stance,
    Quality,
    PairWinner,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Stance => "stance",
            Channel::Quality => "quality",
            Channel::PairWinner => "pair_winner",
        }
    }

    /// True when the judged item is a pair rather than an argument.
    pub fn targets_pairs(self) -> bool {
        self == Channel::PairWinner
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Answer to any of the three questions. The valid subset depends on the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Answer {
    #[serde(rename = "pro")]
    Pro,
    #[serde(rename = "con")]
    Con,
    #[serde(rename = "yes")]
    Yes,
    #[serde(rename = "no")]
    No,
    A,
    B,
}

impl Answer {
    pub fn fits(self, channel: Channel) -> bool {
        matches!(
            (channel, self),
            (Channel::Stance, Answer::Pro | Answer::Con)
                | (Channel::Quality, Answer::Yes | Answer::No)
                | (Channel::PairWinner, Answer::A | Answer::B)
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Pro => "pro",
            Answer::Con => "con",
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::A => "A",
            Answer::B => "B",
        }
    }

    pub fn stance(self) -> Option<Stance> {
        match self {
            Answer::Pro => Some(Stance::Pro),
            Answer::Con => Some(Stance::Con),
            _ => None,
        }
    }
}

impl From<Stance> for Answer {
    fn from(s: Stance) -> Self {
        match s {
            Stance::Pro => Answer::Pro,
            Stance::Con => Answer::Con,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub annotator_id: AnnotatorId,
    /// Argument id for stance/quality, pair id for pair_winner.
    pub item_id: String,
    pub channel: Channel,
    pub answer: Answer,
    /// Present exactly when the judgment was a hidden test question.
    pub gold: Option<Answer>,
}

impl Judgment {
    pub fn is_test(&self) -> bool {
        self.gold.is_some()
    }

    /// `Some(true)` for a failed test question, `None` for a regular judgment.
    pub fn failed_test(&self) -> Option<bool> {
        self.gold.map(|g| g != self.answer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentPair {
    pub pair_id: PairId,
    pub motion_id: MotionId,
    pub arg_a: ArgumentId,
    pub arg_b: ArgumentId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    RemovedTest,
    RemovedPrior,
    RemovedKappa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorProfile {
    pub annotator_id: AnnotatorId,
    pub n_judgments: usize,
    pub n_test_questions: usize,
    /// Failed / answered test questions; 0 when none were answered.
    pub test_failure_rate: f64,
    /// Share of 'yes' among quality answers; 0 when none were given.
    pub yes_prior: f64,
    pub annotator_kappa: Option<f64>,
    pub n_pairwise_kappas: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredArgument {
    pub argument_id: ArgumentId,
    pub quality_score: f64,
    pub n_valid_quality: usize,
    /// `None` when no valid stance answers exist or they split evenly.
    pub stance_majority: Option<Stance>,
    pub stance_agreement: f64,
}

impl ScoredArgument {
    /// Number of valid 'yes' votes behind the score.
    pub fn yes_votes(&self) -> usize {
        (self.quality_score * self.n_valid_quality as f64).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Winner {
    A,
    B,
    #[serde(rename = "tie")]
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub pair_id: PairId,
    pub n_valid: usize,
    pub votes_a: usize,
    pub winner: Winner,
    pub agreement: f64,
    pub a_score: f64,
}

impl LabeledPair {
    /// Builds the label from raw vote counts. `n_valid` must be positive.
    pub fn from_votes(pair_id: impl Into<String>, votes_a: usize, n_valid: usize) -> Self {
        assert!(n_valid > 0 && votes_a <= n_valid, "invalid vote counts");
        let votes_b = n_valid - votes_a;
        let winner = match votes_a.cmp(&votes_b) {
            std::cmp::Ordering::Greater => Winner::A,
            std::cmp::Ordering::Less => Winner::B,
            std::cmp::Ordering::Equal => Winner::Tie,
        };
        LabeledPair {
            pair_id: pair_id.into(),
            n_valid,
            votes_a,
            winner,
            agreement: votes_a.max(votes_b) as f64 / n_valid as f64,
            a_score: votes_a as f64 / n_valid as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold_id: String,
    pub n_instances: usize,
    /// Undefined metrics for the fold are absent.
    pub metrics: BTreeMap<String, f64>,
}
