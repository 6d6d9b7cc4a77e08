//! Inter-annotator agreement: pairwise Cohen's kappa over shared items,
//! per-annotator averages and the task-level average.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AnnotatorId, Answer, Channel, Judgment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaConfig {
    /// Shared judgments two annotators need before their kappa is computed.
    pub min_common_items: usize,
    /// Defined pairwise kappas an annotator needs for an Annotator-kappa.
    pub min_kappa_partners: usize,
}

impl Default for KappaConfig {
    fn default() -> Self {
        KappaConfig {
            min_common_items: 50,
            min_kappa_partners: 5,
        }
    }
}

impl KappaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_common_items == 0 || self.min_kappa_partners == 0 {
            return Err(Error::InvalidConfig(
                "kappa thresholds must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Cohen's kappa for two aligned answer lists.
///
/// Returns `Ok(None)` when chance agreement is 1 (both raters used one and
/// the same category throughout), where kappa is undefined.
pub fn cohen_kappa<T: Eq + Hash>(x: &[T], y: &[T]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty("kappa over zero items"));
    }
    let n = x.len() as u64;
    let mut agree = 0u64;
    let mut margins: HashMap<&T, (u64, u64)> = HashMap::new();
    for (a, b) in x.iter().zip(y) {
        if a == b {
            agree += 1;
        }
        margins.entry(a).or_default().0 += 1;
        margins.entry(b).or_default().1 += 1;
    }
    // kappa = (n*agree - sum mx*my) / (n^2 - sum mx*my), all integer until the end
    let chance: u64 = margins.values().map(|(mx, my)| mx * my).sum();
    let denom = n * n - chance;
    if denom == 0 {
        return Ok(None);
    }
    let numer = (n * agree) as f64 - chance as f64;
    Ok(Some(numer / denom as f64))
}

/// Symmetric map of defined pairwise kappas, keyed by ordered annotator pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairwiseKappas {
    entries: BTreeMap<(AnnotatorId, AnnotatorId), f64>,
}

impl PairwiseKappas {
    fn key(a: &str, b: &str) -> (AnnotatorId, AnnotatorId) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }

    pub fn insert(&mut self, a: &str, b: &str, kappa: f64) {
        self.entries.insert(Self::key(a, b), kappa);
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        self.entries.get(&Self::key(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.entries
            .iter()
            .map(|((a, b), k)| (a.as_str(), b.as_str(), *k))
    }

    /// All kappas involving `annotator`, ordered by partner id.
    pub fn partner_kappas(&self, annotator: &str) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|((a, b), _)| a == annotator || b == annotator)
            .map(|(_, k)| *k)
            .collect()
    }
}

/// Kappa for every annotator pair sharing at least `min_common_items`
/// judgments on `channel`, computed only over the shared items.
pub fn pairwise_kappas<'a>(
    judgments: impl IntoIterator<Item = &'a Judgment>,
    channel: Channel,
    config: &KappaConfig,
) -> PairwiseKappas {
    let mut by_annotator: BTreeMap<&str, HashMap<&str, Answer>> = BTreeMap::new();
    for j in judgments.into_iter().filter(|j| j.channel == channel) {
        by_annotator
            .entry(j.annotator_id.as_str())
            .or_default()
            .insert(j.item_id.as_str(), j.answer);
    }
    let annotators: Vec<(&str, HashMap<&str, Answer>)> = by_annotator
        .into_iter()
        .filter(|(_, items)| items.len() >= config.min_common_items)
        .collect();

    let found: Vec<(usize, usize, f64)> = (0..annotators.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let annotators = &annotators;
            (i + 1..annotators.len()).filter_map(move |j| {
                let (small, large) = if annotators[i].1.len() <= annotators[j].1.len() {
                    (&annotators[i].1, &annotators[j].1)
                } else {
                    (&annotators[j].1, &annotators[i].1)
                };
                let (xs, ys): (Vec<Answer>, Vec<Answer>) = small
                    .iter()
                    .filter_map(|(item, a)| large.get(item).map(|b| (*a, *b)))
                    .unzip();
                if xs.len() < config.min_common_items {
                    return None;
                }
                cohen_kappa(&xs, &ys).ok().flatten().map(|k| (i, j, k))
            })
        })
        .collect();

    let mut out = PairwiseKappas::default();
    for (i, j, k) in found {
        out.insert(annotators[i].0, annotators[j].0, k);
    }
    out
}

/// Unweighted mean of the annotator's pairwise kappas, when there are enough.
pub fn annotator_kappa(
    pairwise: &PairwiseKappas,
    annotator_id: &str,
    config: &KappaConfig,
) -> Option<f64> {
    let ks = pairwise.partner_kappas(annotator_id);
    if ks.len() < config.min_kappa_partners {
        return None;
    }
    Some(ks.iter().sum::<f64>() / ks.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorKappa {
    pub kappa: Option<f64>,
    pub n_pairwise: usize,
}

/// Annotator-kappa for everyone appearing in `pairwise`.
pub fn annotator_kappas(
    pairwise: &PairwiseKappas,
    config: &KappaConfig,
) -> BTreeMap<AnnotatorId, AnnotatorKappa> {
    let mut partners: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (a, b, k) in pairwise.iter() {
        partners.entry(a).or_default().push(k);
        partners.entry(b).or_default().push(k);
    }
    partners
        .into_iter()
        .map(|(id, ks)| {
            let kappa = (ks.len() >= config.min_kappa_partners)
                .then(|| ks.iter().sum::<f64>() / ks.len() as f64);
            (
                id.to_string(),
                AnnotatorKappa {
                    kappa,
                    n_pairwise: ks.len(),
                },
            )
        })
        .collect()
}

/// Mean of the defined Annotator-kappas.
pub fn task_average_kappa(annotator_kappas: impl IntoIterator<Item = f64>) -> Result<f64> {
    let (sum, n) = annotator_kappas
        .into_iter()
        .fold((0.0, 0usize), |(s, n), k| (s + k, n + 1));
    if n == 0 {
        return Err(Error::Empty("no defined Annotator-kappa"));
    }
    Ok(sum / n as f64)
}

/// Task-Average-kappa straight from judgments on one channel.
pub fn task_average_kappa_for<'a>(
    judgments: impl IntoIterator<Item = &'a Judgment>,
    channel: Channel,
    config: &KappaConfig,
) -> Result<f64> {
    let pairwise = pairwise_kappas(judgments, channel, config);
    task_average_kappa(
        annotator_kappas(&pairwise, config)
            .into_values()
            .filter_map(|a| a.kappa),
    )
}
