//! Internal-validity checks on labeled data: agreement between individual
//! scores and pairwise winners, split-half and relabel reproducibility, and
//! transitivity of majority preferences.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aggregate::THRESHOLD_EPS;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{Answer, Channel, LabeledPair, ScoredArgument, Winner};
use crate::stats::pearson;

pub const HEATMAP_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedWinnerReport {
    pub score_diff_min: f64,
    pub agreement: f64,
    pub n_agree: usize,
    pub n_eligible: usize,
    pub n_tie_excluded: usize,
    pub n_equal_score_excluded: usize,
    pub n_below_diff_excluded: usize,
    /// Pairs whose arguments lack an individual score.
    pub n_unscored_excluded: usize,
}

/// Share of labeled pairs whose majority winner is the argument with the
/// higher individual score, over pairs whose scores differ by more than
/// `score_diff_min`.
pub fn expected_winner_agreement(
    scored: &[ScoredArgument],
    labeled: &[LabeledPair],
    corpus: &Corpus,
    score_diff_min: f64,
) -> Result<ExpectedWinnerReport> {
    let scores: HashMap<&str, f64> = scored
        .iter()
        .map(|s| (s.argument_id.as_str(), s.quality_score))
        .collect();
    let mut r = ExpectedWinnerReport {
        score_diff_min,
        agreement: 0.0,
        n_agree: 0,
        n_eligible: 0,
        n_tie_excluded: 0,
        n_equal_score_excluded: 0,
        n_below_diff_excluded: 0,
        n_unscored_excluded: 0,
    };
    for lp in labeled {
        let pair = corpus.pair(&lp.pair_id).ok_or_else(|| Error::DanglingReference {
            kind: "pair",
            id: lp.pair_id.clone(),
        })?;
        let (Some(&sa), Some(&sb)) = (scores.get(pair.arg_a.as_str()), scores.get(pair.arg_b.as_str()))
        else {
            r.n_unscored_excluded += 1;
            continue;
        };
        if lp.winner == Winner::Tie {
            r.n_tie_excluded += 1;
            continue;
        }
        if sa == sb {
            r.n_equal_score_excluded += 1;
            continue;
        }
        if (sa - sb).abs() <= score_diff_min + THRESHOLD_EPS {
            r.n_below_diff_excluded += 1;
            continue;
        }
        let expected = if sa > sb { Winner::A } else { Winner::B };
        r.n_eligible += 1;
        r.n_agree += usize::from(expected == lp.winner);
    }
    if r.n_eligible == 0 {
        return Err(Error::Empty("no pairs eligible for expected-winner agreement"));
    }
    r.agreement = r.n_agree as f64 / r.n_eligible as f64;
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitHalfReport {
    pub min_annotations: usize,
    pub n_arguments: usize,
    pub pearson_r: f64,
    /// `heatmap[i][j]` counts arguments whose first half falls in bin i and
    /// second half in bin j; bins are [0,0.1), ..., [0.9,1.0].
    pub heatmap: [[usize; HEATMAP_BINS]; HEATMAP_BINS],
}

/// Bin of a `yes / n` score; the top bin is closed so a score of 1.0 lands in bin 9.
pub fn score_bin(yes: usize, n: usize) -> usize {
    ((HEATMAP_BINS * yes) / n).min(HEATMAP_BINS - 1)
}

/// Splits each well-annotated argument's valid quality judgments into two
/// random halves and correlates the half scores across arguments.
pub fn split_half_reproducibility(
    corpus: &Corpus,
    mask: &[bool],
    min_annotations: usize,
    seed: u64,
) -> Result<SplitHalfReport> {
    if mask.len() != corpus.judgments().len() {
        return Err(Error::LengthMismatch {
            left: mask.len(),
            right: corpus.judgments().len(),
        });
    }
    let mut votes: BTreeMap<&str, Vec<(&str, bool)>> = BTreeMap::new();
    for (j, _) in corpus
        .judgments()
        .iter()
        .zip(mask)
        .filter(|(j, &m)| m && j.channel == Channel::Quality)
    {
        votes
            .entry(&j.item_id)
            .or_default()
            .push((&j.annotator_id, j.answer == Answer::Yes));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut heatmap = [[0usize; HEATMAP_BINS]; HEATMAP_BINS];
    for (_, mut v) in votes {
        if v.len() < min_annotations.max(2) {
            continue;
        }
        v.sort_unstable();
        v.shuffle(&mut rng);
        if v.len() % 2 == 1 {
            let drop = rng.gen_range(0..v.len());
            v.swap_remove(drop);
        }
        let half = v.len() / 2;
        let yes_a = v[..half].iter().filter(|x| x.1).count();
        let yes_b = v[half..].iter().filter(|x| x.1).count();
        first.push(yes_a as f64 / half as f64);
        second.push(yes_b as f64 / half as f64);
        heatmap[score_bin(yes_a, half)][score_bin(yes_b, half)] += 1;
    }
    if first.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: first.len(),
        });
    }
    Ok(SplitHalfReport {
        min_annotations,
        n_arguments: first.len(),
        pearson_r: pearson(&first, &second)?,
        heatmap,
    })
}

/// Pearson correlation of A-scores between two labelings of the same pairs.
pub fn relabel_correlation(round1: &[LabeledPair], round2: &[LabeledPair]) -> Result<f64> {
    let second: HashMap<&str, f64> = round2.iter().map(|p| (p.pair_id.as_str(), p.a_score)).collect();
    if second.len() != round2.len() {
        return Err(Error::Invalid("second round repeats a pair id".into()));
    }
    let mut x = Vec::with_capacity(round1.len());
    let mut y = Vec::with_capacity(round1.len());
    for p in round1 {
        let s = second
            .get(p.pair_id.as_str())
            .ok_or_else(|| Error::IdMismatch(p.pair_id.clone()))?;
        x.push(p.a_score);
        y.push(*s);
    }
    if x.len() != round2.len() {
        let first: BTreeSet<&str> = round1.iter().map(|p| p.pair_id.as_str()).collect();
        let extra = round2
            .iter()
            .find(|p| !first.contains(p.pair_id.as_str()))
            .map_or_else(String::new, |p| p.pair_id.clone());
        return Err(Error::IdMismatch(extra));
    }
    pearson(&x, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub n_triplets: usize,
    pub n_transitive: usize,
    /// Absent when no fully labeled triplet exists.
    pub fraction: Option<f64>,
    /// Argument pairs labeled more than once with conflicting winners.
    pub n_conflicting_duplicates: usize,
}

/// Over all argument triplets whose three pairs have strict majority
/// winners, the share without a preference cycle.
pub fn transitivity(labeled: &[LabeledPair], corpus: &Corpus) -> Result<TransitivityReport> {
    // (lo, hi) -> winning argument, None for a conflicted duplicate
    let mut edges: BTreeMap<(&str, &str), Option<&str>> = BTreeMap::new();
    for lp in labeled {
        let pair = corpus.pair(&lp.pair_id).ok_or_else(|| Error::DanglingReference {
            kind: "pair",
            id: lp.pair_id.clone(),
        })?;
        let winner = match lp.winner {
            Winner::A => pair.arg_a.as_str(),
            Winner::B => pair.arg_b.as_str(),
            Winner::Tie => continue,
        };
        let (a, b) = (pair.arg_a.as_str(), pair.arg_b.as_str());
        let key = if a < b { (a, b) } else { (b, a) };
        edges
            .entry(key)
            .and_modify(|w| {
                if *w != Some(winner) {
                    *w = None;
                }
            })
            .or_insert(Some(winner));
    }
    let n_conflicting_duplicates = edges.values().filter(|w| w.is_none()).count();
    let beats: HashMap<(&str, &str), bool> = edges
        .iter()
        .filter_map(|(&(a, b), w)| w.map(|w| ((a, b), w == a)))
        .collect();
    let mut neighbours: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for &(a, b) in beats.keys() {
        neighbours.entry(a).or_default().insert(b);
        neighbours.entry(b).or_default().insert(a);
    }
    // true when x beats y
    let wins = |x: &str, y: &str| -> bool {
        if x < y {
            beats[&(x, y)]
        } else {
            !beats[&(y, x)]
        }
    };

    let (mut n_triplets, mut n_transitive) = (0, 0);
    for (&a, na) in &neighbours {
        for &b in na.range::<&str, _>((std::ops::Bound::Excluded(a), std::ops::Bound::Unbounded)) {
            let nb = &neighbours[b];
            for &c in na.range::<&str, _>((std::ops::Bound::Excluded(b), std::ops::Bound::Unbounded)) {
                if !nb.contains(c) {
                    continue;
                }
                n_triplets += 1;
                let out_a = usize::from(wins(a, b)) + usize::from(wins(a, c));
                let out_b = usize::from(wins(b, a)) + usize::from(wins(b, c));
                let out_c = usize::from(wins(c, a)) + usize::from(wins(c, b));
                // a 3-cycle is the only intransitive tournament on three nodes
                if !(out_a == 1 && out_b == 1 && out_c == 1) {
                    n_transitive += 1;
                }
            }
        }
    }
    Ok(TransitivityReport {
        n_triplets,
        n_transitive,
        fraction: (n_triplets > 0).then(|| n_transitive as f64 / n_triplets as f64),
        n_conflicting_duplicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Argument, ArgumentPair, Judgment, Motion, Polarity};

    fn corpus(args: &[&str], pairs: &[(&str, &str, &str)], judgments: Vec<Judgment>) -> Corpus {
        Corpus::new(
            vec![Motion {
                motion_id: "m".into(),
                text: "m".into(),
                concept: "c".into(),
                polarity: Polarity::ProPolicy,
            }],
            args.iter()
                .map(|a| Argument::new(*a, "m", "w w w w w w w w", None))
                .collect(),
            pairs
                .iter()
                .map(|(id, a, b)| ArgumentPair {
                    pair_id: id.to_string(),
                    motion_id: "m".into(),
                    arg_a: a.to_string(),
                    arg_b: b.to_string(),
                })
                .collect(),
            judgments,
        )
        .unwrap()
    }

    fn won(id: &str, winner: Winner) -> LabeledPair {
        let votes_a = match winner {
            Winner::A => 9,
            Winner::B => 1,
            Winner::Tie => 5,
        };
        LabeledPair::from_votes(id, votes_a, 10)
    }

    #[test]
    fn three_way_order_is_transitive() {
        let c = corpus(&["a", "b", "c"], &[("ab", "a", "b"), ("bc", "b", "c"), ("ac", "a", "c")], vec![]);
        let r = transitivity(&[won("ab", Winner::A), won("bc", Winner::A), won("ac", Winner::A)], &c).unwrap();
        assert_eq!((r.n_triplets, r.fraction), (1, Some(1.0)));
    }

    #[test]
    fn cycle_is_intransitive() {
        let c = corpus(&["a", "b", "c"], &[("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a")], vec![]);
        let r = transitivity(&[won("ab", Winner::A), won("bc", Winner::A), won("ca", Winner::A)], &c).unwrap();
        assert_eq!((r.n_triplets, r.fraction), (1, Some(0.0)));
    }

    #[test]
    fn tied_edges_and_missing_triplets() {
        let c = corpus(&["a", "b", "c"], &[("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a")], vec![]);
        let r = transitivity(&[won("ab", Winner::A), won("bc", Winner::Tie), won("ca", Winner::A)], &c).unwrap();
        assert_eq!((r.n_triplets, r.fraction), (0, None));
    }

    #[test]
    fn expected_winner_counts() {
        let c = corpus(
            &["a", "b", "c", "d"],
            &[("ab", "a", "b"), ("cd", "c", "d"), ("ad", "a", "d"), ("bc", "b", "c")],
            vec![],
        );
        let s = |id: &str, q: f64| ScoredArgument {
            argument_id: id.into(),
            quality_score: q,
            n_valid_quality: 10,
            stance_majority: None,
            stance_agreement: 1.0,
        };
        let scored = [s("a", 0.9), s("b", 0.3), s("c", 0.4), s("d", 0.4)];
        let labeled = [
            won("ab", Winner::A),
            won("cd", Winner::B),
            won("ad", Winner::B),
            won("bc", Winner::Tie),
        ];
        let r = expected_winner_agreement(&scored, &labeled, &c, 0.0).unwrap();
        assert_eq!((r.n_eligible, r.n_agree), (2, 1));
        assert_eq!(r.agreement, 0.5);
        assert_eq!((r.n_equal_score_excluded, r.n_tie_excluded), (1, 1));

        let r = expected_winner_agreement(&scored, &labeled, &c, 0.5).unwrap();
        assert_eq!((r.n_eligible, r.n_agree, r.n_below_diff_excluded), (1, 1, 1));
        assert!(expected_winner_agreement(&scored, &labeled, &c, 0.9).is_err());
    }

    #[test]
    fn score_bins() {
        assert_eq!(score_bin(7, 7), 9);
        assert_eq!(score_bin(0, 7), 0);
        assert_eq!(score_bin(3, 10), 3);
        assert_eq!(score_bin(6, 7), 8);
    }

    fn quality(who: usize, item: &str, yes: bool) -> Judgment {
        Judgment {
            annotator_id: format!("w{who:02}"),
            item_id: item.into(),
            channel: Channel::Quality,
            answer: if yes { Answer::Yes } else { Answer::No },
            gold: None,
        }
    }

    #[test]
    fn noiseless_split_half() {
        let mut js = Vec::new();
        for k in 0..15 {
            js.push(quality(k, "a", true));
            js.push(quality(k, "b", false));
            js.push(quality(k, "c", true));
        }
        for k in 0..5 {
            js.push(quality(k, "d", true));
        }
        let c = corpus(&["a", "b", "c", "d"], &[], js);
        let mask = vec![true; c.judgments().len()];
        let r = split_half_reproducibility(&c, &mask, 14, 3).unwrap();
        assert_eq!(r.n_arguments, 3);
        assert_eq!(r.pearson_r, 1.0);
        assert_eq!(r.heatmap[9][9], 2);
        assert_eq!(r.heatmap[0][0], 1);
        assert_eq!(r, split_half_reproducibility(&c, &mask, 14, 3).unwrap());
        assert!(split_half_reproducibility(&c, &mask, 16, 3).is_err());
    }

    #[test]
    fn relabel_examples() {
        let r1: Vec<_> = [(3, 10), (7, 10), (5, 10), (9, 10)]
            .iter()
            .enumerate()
            .map(|(i, &(a, n))| LabeledPair::from_votes(format!("p{i}"), a, n))
            .collect();
        assert!((relabel_correlation(&r1, &r1).unwrap() - 1.0).abs() < 1e-12);
        let flipped: Vec<_> = r1
            .iter()
            .map(|p| LabeledPair::from_votes(p.pair_id.clone(), p.n_valid - p.votes_a, p.n_valid))
            .collect();
        assert!((relabel_correlation(&r1, &flipped).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(
            relabel_correlation(&r1, &flipped[1..]),
            Err(Error::IdMismatch(id)) if id == "p0"
        ));
        let mut extra = flipped.clone();
        extra.push(LabeledPair::from_votes("zz", 1, 2));
        assert!(matches!(relabel_correlation(&r1, &extra), Err(Error::IdMismatch(id)) if id == "zz"));
    }
}
