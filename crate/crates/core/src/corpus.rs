//! In-memory tables with referential integrity enforced at construction.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::model::{
    Argument, ArgumentPair, Channel, Judgment, Motion, MAX_ARGUMENT_TOKENS, MIN_ARGUMENT_TOKENS,
};

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    motions: Vec<Motion>,
    arguments: Vec<Argument>,
    pairs: Vec<ArgumentPair>,
    judgments: Vec<Judgment>,
    motion_index: HashMap<String, usize>,
    argument_index: HashMap<String, usize>,
    pair_index: HashMap<String, usize>,
    warnings: Vec<String>,
}

impl Corpus {
    /// Validates and indexes the four tables. Fails on the first duplicate
    /// id, dangling reference, empty text or channel/answer mismatch.
    pub fn new(
        motions: Vec<Motion>,
        arguments: Vec<Argument>,
        pairs: Vec<ArgumentPair>,
        judgments: Vec<Judgment>,
    ) -> Result<Self> {
        let mut warnings = Vec::new();

        let mut motion_index = HashMap::with_capacity(motions.len());
        for (i, m) in motions.iter().enumerate() {
            if m.text.trim().is_empty() {
                return Err(Error::Invalid(format!("motion '{}' has empty text", m.motion_id)));
            }
            if motion_index.insert(m.motion_id.clone(), i).is_some() {
                return Err(Error::Duplicate {
                    kind: "motion",
                    id: m.motion_id.clone(),
                });
            }
        }

        let mut argument_index = HashMap::with_capacity(arguments.len());
        for (i, a) in arguments.iter().enumerate() {
            if !motion_index.contains_key(&a.motion_id) {
                return Err(Error::DanglingReference {
                    kind: "motion",
                    id: a.motion_id.clone(),
                });
            }
            if a.token_count == 0 {
                return Err(Error::Invalid(format!(
                    "argument '{}' has empty text",
                    a.argument_id
                )));
            }
            if a.token_count != crate::model::token_count(&a.text) {
                return Err(Error::Invalid(format!(
                    "argument '{}' token count does not match its text",
                    a.argument_id
                )));
            }
            if !(MIN_ARGUMENT_TOKENS..=MAX_ARGUMENT_TOKENS).contains(&a.token_count) {
                warnings.push(format!(
                    "argument '{}' has {} tokens, outside {MIN_ARGUMENT_TOKENS}-{MAX_ARGUMENT_TOKENS}",
                    a.argument_id, a.token_count
                ));
            }
            if argument_index.insert(a.argument_id.clone(), i).is_some() {
                return Err(Error::Duplicate {
                    kind: "argument",
                    id: a.argument_id.clone(),
                });
            }
        }

        let mut pair_index = HashMap::with_capacity(pairs.len());
        for (i, p) in pairs.iter().enumerate() {
            if !motion_index.contains_key(&p.motion_id) {
                return Err(Error::DanglingReference {
                    kind: "motion",
                    id: p.motion_id.clone(),
                });
            }
            if p.arg_a == p.arg_b {
                return Err(Error::Invalid(format!(
                    "pair '{}' pairs argument '{}' with itself",
                    p.pair_id, p.arg_a
                )));
            }
            for arg in [&p.arg_a, &p.arg_b] {
                let Some(&idx) = argument_index.get(arg) else {
                    return Err(Error::DanglingReference {
                        kind: "argument",
                        id: arg.clone(),
                    });
                };
                if arguments[idx].motion_id != p.motion_id {
                    return Err(Error::Invalid(format!(
                        "pair '{}' uses argument '{}' from another motion",
                        p.pair_id, arg
                    )));
                }
            }
            if pair_index.insert(p.pair_id.clone(), i).is_some() {
                return Err(Error::Duplicate {
                    kind: "pair",
                    id: p.pair_id.clone(),
                });
            }
        }

        let mut seen: HashSet<(&str, &str, Channel)> = HashSet::with_capacity(judgments.len());
        for j in &judgments {
            if !j.answer.fits(j.channel) || j.gold.is_some_and(|g| !g.fits(j.channel)) {
                return Err(Error::Invalid(format!(
                    "judgment by '{}' on '{}': answer does not fit channel {}",
                    j.annotator_id, j.item_id, j.channel
                )));
            }
            let known = if j.channel.targets_pairs() {
                pair_index.contains_key(&j.item_id)
            } else {
                argument_index.contains_key(&j.item_id)
            };
            if !known {
                return Err(Error::DanglingReference {
                    kind: if j.channel.targets_pairs() { "pair" } else { "argument" },
                    id: j.item_id.clone(),
                });
            }
            if !seen.insert((&j.annotator_id, &j.item_id, j.channel)) {
                return Err(Error::DuplicateJudgment {
                    annotator_id: j.annotator_id.clone(),
                    item_id: j.item_id.clone(),
                    channel: j.channel.to_string(),
                });
            }
        }

        Ok(Corpus {
            motions,
            arguments,
            pairs,
            judgments,
            motion_index,
            argument_index,
            pair_index,
            warnings,
        })
    }

    pub fn motions(&self) -> &[Motion] {
        &self.motions
    }

    pub fn arguments(&self) -> &[Argument] {
        &self.arguments
    }

    pub fn pairs(&self) -> &[ArgumentPair] {
        &self.pairs
    }

    pub fn judgments(&self) -> &[Judgment] {
        &self.judgments
    }

    /// Non-fatal findings from construction, such as out-of-range lengths.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn motion(&self, id: &str) -> Option<&Motion> {
        self.motion_index.get(id).map(|&i| &self.motions[i])
    }

    pub fn argument(&self, id: &str) -> Option<&Argument> {
        self.argument_index.get(id).map(|&i| &self.arguments[i])
    }

    pub fn pair(&self, id: &str) -> Option<&ArgumentPair> {
        self.pair_index.get(id).map(|&i| &self.pairs[i])
    }

    pub fn channels(&self) -> HashSet<Channel> {
        self.judgments.iter().map(|j| j.channel).collect()
    }

    /// Copy of this corpus with a different argument, pair and judgment set.
    pub fn rebuild(
        &self,
        arguments: Vec<Argument>,
        pairs: Vec<ArgumentPair>,
        judgments: Vec<Judgment>,
    ) -> Result<Self> {
        Corpus::new(self.motions.clone(), arguments, pairs, judgments)
    }
}
