//! Brute-force reference implementations and small corpus builders shared by
//! the integration tests. Nothing here calls into the library's statistics.

#![allow(dead_code)]

use std::collections::BTreeMap;

use argq_core::model::{Answer, Argument, ArgumentPair, Channel, Judgment, Motion, Polarity, Stance};
use argq_core::Corpus;
use rand::Rng;

/// Kappa from an explicit contingency table.
pub fn kappa_oracle(x: &[u8], y: &[u8]) -> Option<f64> {
    let cats: Vec<u8> = {
        let mut c: Vec<u8> = x.iter().chain(y).copied().collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let k = cats.len();
    let idx = |v: u8| cats.iter().position(|&c| c == v).unwrap();
    let mut table = vec![vec![0usize; k]; k];
    for (&a, &b) in x.iter().zip(y) {
        table[idx(a)][idx(b)] += 1;
    }
    let n = x.len() as f64;
    let po = (0..k).map(|i| table[i][i]).sum::<usize>() as f64 / n;
    let pe: f64 = (0..k)
        .map(|i| {
            let row: usize = table[i].iter().sum();
            let col: usize = (0..k).map(|r| table[r][i]).sum();
            (row as f64 / n) * (col as f64 / n)
        })
        .sum();
    let constant_same = x.iter().all(|&v| v == x[0]) && y.iter().all(|&v| v == x[0]);
    if constant_same {
        return None;
    }
    Some((po - pe) / (1.0 - pe))
}

/// Textbook single-pass sum formula.
pub fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

/// Rank = #smaller + (#equal + 1) / 2, by direct counting.
pub fn ranks_oracle(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let less = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    pearson_oracle(&ranks_oracle(x), &ranks_oracle(y))
}

/// Counts every positive/negative pair.
pub fn auc_oracle(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut total = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                total += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / total
}

/// Two-tailed exact p by visiting all 2^n sign patterns.
pub fn wilcoxon_enumeration_oracle(a: &[f64], b: &[f64]) -> Option<(f64, f64)> {
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return None;
    }
    let mags: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = ranks_oracle(&mags);
    let observed: f64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let n = diffs.len();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= observed {
            le += 1;
        }
        if w >= observed {
            ge += 1;
        }
    }
    let p = (2 * le.min(ge)) as f64 / (1u64 << n) as f64;
    Some((observed, p.min(1.0)))
}

pub fn motion(id: &str) -> Motion {
    Motion {
        motion_id: id.into(),
        text: format!("We should consider {id}"),
        concept: format!("concept-{id}"),
        polarity: Polarity::ProPolicy,
    }
}

/// Text of exactly `tokens` words.
pub fn text_of(tokens: usize) -> String {
    vec!["word"; tokens].join(" ")
}

pub fn argument(id: &str, motion_id: &str, tokens: usize) -> Argument {
    Argument::new(id, motion_id, text_of(tokens), Some(Stance::Pro))
}

pub fn judgment(annotator: &str, item: &str, channel: Channel, answer: Answer) -> Judgment {
    Judgment {
        annotator_id: annotator.into(),
        item_id: item.into(),
        channel,
        answer,
        gold: None,
    }
}

/// One motion whose arguments are ranked by index; every unordered pair is
/// labeled by `n_votes` unanimous votes for the higher-ranked argument.
pub fn total_order_corpus(n_args: usize, n_votes: usize, rng: &mut impl Rng) -> Corpus {
    let ids: Vec<String> = (0..n_args).map(|i| format!("x{i:02}")).collect();
    let mut pairs = Vec::new();
    let mut judgments = Vec::new();
    for i in 0..n_args {
        for j in i + 1..n_args {
            let (a, b) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            let pair_id = format!("{}__{}", ids[a], ids[b]);
            let winner = if a > b { Answer::A } else { Answer::B };
            for v in 0..n_votes {
                judgments.push(judgment(&format!("v{v}"), &pair_id, Channel::PairWinner, winner));
            }
            pairs.push(ArgumentPair {
                pair_id,
                motion_id: "m".into(),
                arg_a: ids[a].clone(),
                arg_b: ids[b].clone(),
            });
        }
    }
    Corpus::new(
        vec![motion("m")],
        ids.iter().map(|id| argument(id, "m", 10)).collect(),
        pairs,
        judgments,
    )
    .unwrap()
}

/// Per annotator, the answers given on one channel keyed by item.
pub fn answers_by_annotator(judgments: &[Judgment], channel: Channel) -> BTreeMap<&str, BTreeMap<&str, Answer>> {
    let mut out: BTreeMap<&str, BTreeMap<&str, Answer>> = BTreeMap::new();
    for j in judgments.iter().filter(|j| j.channel == channel) {
        out.entry(&j.annotator_id).or_default().insert(&j.item_id, j.answer);
    }
    out
}
