//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines are always printed; exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::time::{Duration, Instant};

use argq_core::agreement::cohen_kappa;
use argq_core::aggregate::{label_pairs, score_arguments, select_pairs, SelectConfig};
use argq_core::cleanse::{cleanse, CleanseConfig};
use argq_core::consistency::{expected_winner_agreement, split_half_reproducibility, transitivity};
use argq_core::eval::{
    argument_folds, baseline_predictions, check_partition, evaluate_pairs, evaluate_ranking, pair_folds,
    FoldGrouping, PredictionRecord, Predictions,
};
use argq_core::ingest::{cleanliness_report, load_corpus, CorpusPaths, Vocabulary};
use argq_core::model::{ScoredArgument, Stance, Verdict, Winner};
use argq_core::simulate::{simulate, AnnotatorKind, PairPlan, QualityPrior, SimConfig};
use argq_core::stats::{pearson, roc_auc, spearman, wilcoxon_signed_rank};
use argq_core::Corpus;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn stats_oracle_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut cases = [0usize; 4];
    while cases.iter().any(|&c| c < 500) {
        let n = rng.gen_range(2..30);
        let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let y: Vec<u8> = (0..n).map(|i| if rng.gen_bool(0.5) { x[i] } else { rng.gen_range(0..3) }).collect();
        if cases[0] < 500 {
            match (cohen_kappa(&x, &y).unwrap(), kappa_oracle(&x, &y)) {
                (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
                (None, None) => {}
                _ => return Outcome::Fail("kappa definedness differs from oracle".into()),
            }
            cases[0] += 1;
        }
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64 / 2.0).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        if let (Ok(r), Ok(rho)) = (pearson(&xs, &ys), spearman(&xs, &ys)) {
            if cases[1] < 500 {
                worst = worst.max((r - pearson_oracle(&xs, &ys)).abs());
                cases[1] += 1;
            }
            if cases[2] < 500 {
                worst = worst.max((rho - spearman_oracle(&xs, &ys)).abs());
                cases[2] += 1;
            }
        }
        let labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        if cases[3] < 500 {
            if let Ok(auc) = roc_auc(&xs, &labels) {
                worst = worst.max((auc - auc_oracle(&xs, &labels)).abs());
                cases[3] += 1;
            }
        }
    }
    let mut wilcoxon_mismatch = 0;
    let mut wilcoxon_cases = 0;
    while wilcoxon_cases < 200 {
        let n = rng.gen_range(1..=12);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
        let Some((_, p)) = wilcoxon_enumeration_oracle(&a, &b) else {
            continue;
        };
        let t = wilcoxon_signed_rank(&a, &b).unwrap();
        if !t.exact || t.p_value != p {
            wilcoxon_mismatch += 1;
        }
        wilcoxon_cases += 1;
    }
    let elapsed = start.elapsed();
    check(
        worst < 1e-10 && wilcoxon_mismatch == 0 && elapsed < Duration::from_secs(60),
        format!(
            "kappa/pearson/spearman/auc 500 cases each, max |delta| {worst:.2e}; wilcoxon {wilcoxon_cases} cases, {wilcoxon_mismatch} mismatches; {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn cleansing_recovery() -> Outcome {
    let start = Instant::now();
    let (mut yes_total, mut yes_removed) = (0, 0);
    let (mut rand_total, mut rand_removed) = (0, 0);
    let (mut faithful_total, mut faithful_kept) = (0, 0);
    let mut min_r = f64::INFINITY;
    for seed in 0..20 {
        let sim = simulate(&SimConfig {
            n_motions: 4,
            n_args_per_motion: 50,
            judgments_per_item: 11,
            seed,
            ..SimConfig::mixed(15, 0.9, 2, 1)
        })
        .unwrap();
        let corpus = sim.individual_corpus().unwrap();
        let (clean, report) = cleanse(&corpus, &CleanseConfig::individual()).unwrap();
        for profile in &report.annotators {
            let removed = profile.verdict != Verdict::Valid;
            match sim.annotators[&profile.annotator_id] {
                AnnotatorKind::SpammerYes => {
                    yes_total += 1;
                    yes_removed += usize::from(removed);
                }
                AnnotatorKind::SpammerRandom => {
                    rand_total += 1;
                    rand_removed += usize::from(removed);
                }
                AnnotatorKind::Faithful(_) => {
                    faithful_total += 1;
                    faithful_kept += usize::from(!removed);
                }
            }
        }
        let scored = score_arguments(&clean, &vec![true; clean.judgments().len()]).unwrap();
        let truth = sim.true_quality();
        let (x, y): (Vec<f64>, Vec<f64>) = scored
            .arguments
            .iter()
            .map(|s| (s.quality_score, truth[s.argument_id.as_str()]))
            .unzip();
        min_r = min_r.min(pearson(&x, &y).unwrap());
    }
    let share = |a: usize, b: usize| a as f64 / b as f64;
    let elapsed = start.elapsed();
    check(
        yes_removed == yes_total
            && share(rand_removed, rand_total) >= 0.95
            && share(faithful_kept, faithful_total) >= 0.95
            && min_r >= 0.9
            && elapsed < Duration::from_secs(120),
        format!(
            "20 seeds: spammer_yes removed {yes_removed}/{yes_total}, spammer_random removed {rand_removed}/{rand_total}, faithful kept {faithful_kept}/{faithful_total}, min Pearson vs planted {min_r:.3}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn consistency_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let order = total_order_corpus(15, 3, &mut rng);
    let labeled = label_pairs(&order, &vec![true; order.judgments().len()]).unwrap();
    let t = transitivity(&labeled.pairs, &order).unwrap();
    let transitive_ok = t.fraction == Some(1.0) && t.n_triplets == 15 * 14 * 13 / 6;

    let sim = simulate(&SimConfig {
        annotators: vec![AnnotatorKind::Faithful(1.0); 16],
        judgments_per_item: 16,
        quality_prior: QualityPrior::Binary,
        ..SimConfig::default()
    })
    .unwrap();
    let ind = sim.individual_corpus().unwrap();
    let split = split_half_reproducibility(&ind, &vec![true; ind.judgments().len()], 14, 1).unwrap();
    let diagonal = (0..10).all(|i| (0..10).all(|j| i == j || split.heatmap[i][j] == 0));
    let split_ok = split.pearson_r == 1.0 && diagonal;

    let sim = simulate(&SimConfig {
        n_args_per_motion: 25,
        annotators: vec![AnnotatorKind::Faithful(1.0); 15],
        pairs: PairPlan::All,
        ..SimConfig::default()
    })
    .unwrap();
    let ind = sim.individual_corpus().unwrap();
    let pairs = sim.pairs_corpus().unwrap();
    let scored = score_arguments(&ind, &vec![true; ind.judgments().len()]).unwrap();
    let lp = label_pairs(&pairs, &vec![true; pairs.judgments().len()]).unwrap();
    let ew = expected_winner_agreement(&scored.arguments, &lp.pairs, &pairs, 0.0).unwrap();

    check(
        transitive_ok && split_ok && ew.agreement == 1.0,
        format!(
            "transitivity {} over {} triplets; split-half r {} over {} arguments, diagonal heatmap {diagonal}; expected-winner {} over {} pairs",
            t.fraction.map_or("undefined".to_string(), |f| f.to_string()), t.n_triplets, split.pearson_r, split.n_arguments, ew.agreement, ew.n_eligible
        ),
    )
}

fn pair_selection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut emitted, mut violations, mut nondeterministic) = (0, 0, 0);
    for corpus_ix in 0..50 {
        let n_motions = rng.gen_range(1..4);
        let motions = (0..n_motions).map(|m| motion(&format!("m{m}"))).collect();
        let mut arguments = Vec::new();
        let mut scored = Vec::new();
        // (motion, tokens, yes of 11, majority votes of 10, pro)
        let mut raw = Vec::new();
        for i in 0..rng.gen_range(5..60) {
            let r = (
                rng.gen_range(0..n_motions),
                rng.gen_range(8..=36usize),
                rng.gen_range(0..=11i64),
                rng.gen_range(5..=10),
                rng.gen_bool(0.5),
            );
            let id = format!("a{i:03}");
            arguments.push(argument(&id, &format!("m{}", r.0), r.1));
            scored.push(ScoredArgument {
                argument_id: id.clone(),
                quality_score: r.2 as f64 / 11.0,
                n_valid_quality: 11,
                stance_majority: Some(if r.4 { Stance::Pro } else { Stance::Con }),
                stance_agreement: r.3 as f64 / 10.0,
            });
            raw.push((id, r));
        }
        let corpus = Corpus::new(motions, arguments, Vec::new(), Vec::new()).unwrap();
        let by_id: HashMap<&str, _> = raw.iter().map(|(id, r)| (id.as_str(), *r)).collect();
        let cfg = SelectConfig {
            budget: rng.gen_range(1..200),
            seed: corpus_ix,
            ..SelectConfig::default()
        };
        let picked = select_pairs(&scored, &corpus, &cfg).unwrap();
        let mut seen = BTreeSet::new();
        for p in &picked {
            let (x, y) = (by_id[p.arg_a.as_str()], by_id[p.arg_b.as_str()]);
            let longer = x.1.max(y.1) as i64;
            let ok = p.arg_a != p.arg_b
                && x.0 == y.0
                && x.4 == y.4
                && x.3 >= 8
                && y.3 >= 8
                && (x.2 - y.2).abs() * 5 >= 11
                && (x.1 as i64 - y.1 as i64).abs() * 5 <= longer
                && seen.insert(if p.arg_a < p.arg_b { (&p.arg_a, &p.arg_b) } else { (&p.arg_b, &p.arg_a) });
            violations += usize::from(!ok);
        }
        emitted += picked.len();
        if select_pairs(&scored, &corpus, &cfg).unwrap() != picked {
            nondeterministic += 1;
        }
    }
    check(
        violations == 0 && nondeterministic == 0 && emitted > 0,
        format!("50 corpora: {emitted} pairs emitted, {violations} predicate violations, {nondeterministic} non-deterministic reruns"),
    )
}

fn harness_self_test() -> Outcome {
    let sim = simulate(&SimConfig {
        n_motions: 6,
        n_args_per_motion: 20,
        pairs: PairPlan::PerMotion(40),
        ..SimConfig::default()
    })
    .unwrap();
    let pairs = sim.pairs_corpus().unwrap();
    let labeled = label_pairs(&pairs, &vec![true; pairs.judgments().len()]).unwrap();
    let winners: HashMap<&str, Winner> = labeled.pairs.iter().map(|p| (p.pair_id.as_str(), p.winner)).collect();
    let pfolds = pair_folds(&pairs, FoldGrouping::Motion).unwrap();
    let gold_pairs = Predictions::from_records(pfolds.iter().flat_map(|f| {
        f.test.iter().map(|id| PredictionRecord {
            fold_id: f.fold_id.clone(),
            item_id: id.clone(),
            value: if winners.get(id.as_str()) == Some(&Winner::A) { 1.0 } else { 0.0 },
        })
    }))
    .unwrap();
    let pr = evaluate_pairs(&gold_pairs, &labeled.pairs, &pfolds).unwrap();

    let ind = sim.individual_corpus().unwrap();
    let scored = score_arguments(&ind, &vec![true; ind.judgments().len()]).unwrap();
    let score: HashMap<&str, f64> = scored.arguments.iter().map(|s| (s.argument_id.as_str(), s.quality_score)).collect();
    let afolds = argument_folds(&ind, FoldGrouping::Motion).unwrap();
    let gold_scores = Predictions::from_records(afolds.iter().flat_map(|f| {
        f.test.iter().map(|id| PredictionRecord {
            fold_id: f.fold_id.clone(),
            item_id: id.clone(),
            value: score[id.as_str()],
        })
    }))
    .unwrap();
    let rr = evaluate_ranking(&gold_scores, &scored.arguments, &afolds).unwrap();

    let one = |v: f64| (v - 1.0).abs() < 1e-12;
    let per_fold_ok = pr.folds.iter().all(|f| one(f.metrics["accuracy"]) && one(f.metrics["auc"]))
        && rr.folds.iter().all(|f| one(f.metrics["pearson"]) && one(f.metrics["spearman"]));
    let weighted_ok = ["accuracy", "auc"].iter().all(|m| one(pr.weighted[*m]))
        && ["pearson", "spearman"].iter().all(|m| one(rr.weighted[*m]));
    let partition_ok = check_partition(&pfolds).is_ok()
        && check_partition(&afolds).is_ok()
        && pfolds.iter().map(|f| f.test.len()).sum::<usize>() == pairs.pairs().len()
        && afolds.iter().map(|f| f.test.len()).sum::<usize>() == ind.arguments().len();
    check(
        per_fold_ok && weighted_ok && partition_ok,
        format!(
            "{} pair folds, {} argument folds; weighted acc {} auc {} r {} rho {}; partition exact {partition_ok}",
            pfolds.len(),
            afolds.len(),
            pr.weighted["accuracy"],
            pr.weighted["auc"],
            rr.weighted["pearson"],
            rr.weighted["spearman"]
        ),
    )
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

/// Expects `individual/` and `pairs/` in the standard file layout, and
/// optionally `vocabulary.txt`, under `$ARGQ_RELEASED_DATA`.
fn released_data() -> Outcome {
    let Some(root) = std::env::var_os("ARGQ_RELEASED_DATA") else {
        return Outcome::Skip("ARGQ_RELEASED_DATA not set; released datasets unavailable".into());
    };
    let root = Path::new(&root);
    let run = || -> argq_core::Result<(bool, String)> {
        let ind = load_corpus(&CorpusPaths::in_dir(&root.join("individual")))?;
        let pairs = load_corpus(&CorpusPaths::in_dir(&root.join("pairs")))?;
        let (ind_clean, _) = cleanse(&ind, &CleanseConfig::individual())?;
        let (pairs_clean, _) = cleanse(&pairs, &CleanseConfig::pairs())?;
        let n_args = ind_clean.arguments().len() as f64;
        let n_pairs = pairs_clean.pairs().len() as f64;

        let scored = score_arguments(&ind_clean, &vec![true; ind_clean.judgments().len()])?;
        let labeled = label_pairs(&pairs_clean, &vec![true; pairs_clean.judgments().len()])?;
        let trans = transitivity(&labeled.pairs, &pairs_clean)?;
        let ew0 = expected_winner_agreement(&scored.arguments, &labeled.pairs, &pairs_clean, 0.0)?;
        let ew5 = expected_winner_agreement(&scored.arguments, &labeled.pairs, &pairs_clean, 0.5)?;
        let folds = pair_folds(&pairs_clean, FoldGrouping::Motion)?;
        let base = Predictions::from_records(baseline_predictions(&pairs_clean, &folds)?)?;
        let eval = evaluate_pairs(&base, &labeled.pairs, &folds)?;
        let tfrac = trans.fraction.unwrap_or(0.0);

        let mut ok = within(n_args, 5300.0, 106.0)
            && within(n_pairs, 9100.0, 182.0)
            && within(tfrac, 0.962, 0.01)
            && within(ew0.agreement, 0.75, 0.02)
            && within(ew5.agreement, 0.843, 0.02)
            && within(eval.weighted["accuracy"], 0.55, 0.02)
            && within(eval.weighted["auc"], 0.59, 0.02);
        let mut detail = format!(
            "arguments {n_args}, pairs {n_pairs}, transitivity {tfrac:.3} over {} triplets, expected-winner {:.3}/{:.3}, Arg-Length acc {:.3} auc {:.3}",
            trans.n_triplets, ew0.agreement, ew5.agreement, eval.weighted["accuracy"], eval.weighted["auc"]
        );
        let vocab_path = root.join("vocabulary.txt");
        if vocab_path.exists() {
            let vocab = Vocabulary::from_file(&vocab_path, true)?;
            let clean = cleanliness_report(&ind, &vocab)?.histogram.zero;
            ok &= within(clean, 0.9478, 0.01);
            detail.push_str(&format!(", no-malformed fraction {clean:.4}"));
        }
        Ok((ok, detail))
    };
    match run() {
        Ok((ok, detail)) => check(ok, detail),
        Err(e) => Outcome::Fail(format!("could not process released data: {e}")),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("statistics kernel oracle suite", stats_oracle_suite),
        ("cleansing recovery on simulated campaigns", cleansing_recovery),
        ("consistency machinery limits", consistency_machinery),
        ("pair selection predicates and determinism", pair_selection),
        ("harness self-test with gold predictions", harness_self_test),
        ("released-data integration", released_data),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Outcome::Pass(d) => println!("PASS  {name}: {d}"),
            Outcome::Skip(d) => println!("SKIP  {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
