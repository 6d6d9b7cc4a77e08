//! Statistics kernel: correlation, ROC-AUC, accuracy, the two-tailed
//! Wilcoxon signed-rank test and weighted means.
//!
//! Ties are resolved with average ranks throughout.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest number of non-zero differences for which the Wilcoxon test
/// uses the exact null distribution.
pub const WILCOXON_EXACT_MAX_N: usize = 25;

fn ensure_same_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

fn ensure_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::Invalid(format!("non-finite value {v}"))),
        None => Ok(()),
    }
}

fn is_constant(values: &[f64]) -> bool {
    values.iter().all(|&v| v == values[0])
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    ensure_same_len(x.len(), y.len())?;
    if x.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: x.len(),
        });
    }
    ensure_finite(x)?;
    ensure_finite(y)?;
    if is_constant(x) || is_constant(y) {
        return Err(Error::ZeroVariance);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks with tied values sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their average
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Rank correlation: Pearson over average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    ensure_same_len(x.len(), y.len())?;
    ensure_finite(x)?;
    ensure_finite(y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Area under the ROC curve in its Mann-Whitney form: the probability that a
/// random positive outscores a random negative, ties counting one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    ensure_same_len(scores.len(), labels.len())?;
    ensure_finite(scores)?;
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(r, _)| r)
        .sum();
    let (p, q) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

pub fn accuracy<T: PartialEq>(pred: &[T], gold: &[T]) -> Result<f64> {
    ensure_same_len(pred.len(), gold.len())?;
    if gold.is_empty() {
        return Err(Error::Empty("accuracy over zero items"));
    }
    let hits = pred.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(hits as f64 / gold.len() as f64)
}

pub fn weighted_mean(values: &[f64], weights: &[f64]) -> Result<f64> {
    ensure_same_len(values.len(), weights.len())?;
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::Invalid("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    let acc: f64 = values.iter().zip(weights).map(|(v, w)| v * w).sum();
    Ok(acc / total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonTest {
    /// Differences left after dropping exact zeros.
    pub n: usize,
    /// Sum of average ranks of positive differences.
    pub w_plus: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Two-tailed Wilcoxon signed-rank test on paired samples `a - b`.
///
/// Zero differences are dropped. Up to [`WILCOXON_EXACT_MAX_N`] remaining
/// pairs the p-value comes from the exact sign-flip distribution of W+,
/// `p = min(1, 2 * min(P(W+ <= w), P(W+ >= w)))`. Larger samples use the
/// normal approximation with tie and continuity corrections.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonTest> {
    ensure_same_len(a.len(), b.len())?;
    ensure_finite(a)?;
    ensure_finite(b)?;
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(Error::AllZeroDifferences);
    }
    let n = diffs.len();
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    // average ranks are multiples of 1/2, so doubled ranks are exact integers
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let w_plus_doubled: usize = doubled
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let w_plus = w_plus_doubled as f64 / 2.0;

    if n <= WILCOXON_EXACT_MAX_N {
        let p_value = exact_two_tailed(&doubled, w_plus_doubled);
        return Ok(WilcoxonTest {
            n,
            w_plus,
            p_value,
            exact: true,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = tie_group_sizes(&magnitudes)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum::<f64>()
        / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let p_value = erfc(z / std::f64::consts::SQRT_2).min(1.0);
    Ok(WilcoxonTest {
        n,
        w_plus,
        p_value,
        exact: false,
    })
}

pub fn wilcoxon_signed_rank_two_tailed(a: &[f64], b: &[f64]) -> Result<f64> {
    wilcoxon_signed_rank(a, b).map(|t| t.p_value)
}

fn tie_group_sizes(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        sizes.push(end - start);
        start = end;
    }
    sizes
}

/// Counts sign assignments by their doubled W+ with a subset-sum table.
fn exact_two_tailed(doubled_ranks: &[usize], observed: usize) -> f64 {
    let total: usize = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in doubled_ranks {
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let at_most: u64 = counts[..=observed].iter().sum();
    let at_least: u64 = counts[observed..].iter().sum();
    let patterns = 1u64 << doubled_ranks.len();
    let tail = 2 * at_most.min(at_least);
    (tail as f64 / patterns as f64).min(1.0)
}
