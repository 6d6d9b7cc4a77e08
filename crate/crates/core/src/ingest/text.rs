//! Malformed-token counting and argument length profiles.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Known-word list for the out-of-vocabulary check.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: HashSet<String>,
    lowercase: bool,
}

impl Vocabulary {
    /// `lowercase` folds both the entries and the looked-up tokens.
    pub fn new(words: impl IntoIterator<Item = impl Into<String>>, lowercase: bool) -> Result<Self> {
        let words: HashSet<String> = words
            .into_iter()
            .map(|w| {
                let w: String = w.into();
                if lowercase {
                    w.to_lowercase()
                } else {
                    w
                }
            })
            .filter(|w| !w.is_empty())
            .collect();
        if words.is_empty() {
            return Err(Error::Empty("vocabulary"));
        }
        Ok(Vocabulary { words, lowercase })
    }

    /// One entry per line; only the first whitespace-separated field is
    /// used, so embedding files with trailing vectors load as well.
    pub fn from_file(path: &Path, lowercase: bool) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::new(
            body.lines().filter_map(|l| l.split_whitespace().next()),
            lowercase,
        )
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        if self.lowercase {
            self.words.contains(&word.to_lowercase())
        } else {
            self.words.contains(word)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub html_markup: usize,
    pub link: usize,
    pub excessive_punctuation: usize,
    pub out_of_vocabulary: usize,
}

impl CategoryCounts {
    fn add(&mut self, other: &CategoryCounts) {
        self.html_markup += other.html_markup;
        self.link += other.link;
        self.excessive_punctuation += other.excessive_punctuation;
        self.out_of_vocabulary += other.out_of_vocabulary;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalformedCount {
    pub total: usize,
    pub categories: CategoryCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Malformed {
    Html,
    Link,
    Punctuation,
    OutOfVocabulary,
}

fn html_tag() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"</?[A-Za-z!][^<>]*>").unwrap())
}

fn link() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)([a-z][a-z0-9+.\-]*://|^[^a-z0-9]*www\.)").unwrap())
}

fn punct_run() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\p{P}\p{S}]{3,}").unwrap())
}

// html > link > punctuation > oov; a token counts once
fn classify(token: &str, vocabulary: &Vocabulary) -> Option<Malformed> {
    if html_tag().is_match(token) {
        return Some(Malformed::Html);
    }
    if link().is_match(token) {
        return Some(Malformed::Link);
    }
    if punct_run().is_match(token) {
        return Some(Malformed::Punctuation);
    }
    let word = token.trim_matches(|c: char| !c.is_alphanumeric());
    if !word.is_empty() && !vocabulary.contains(word) {
        return Some(Malformed::OutOfVocabulary);
    }
    None
}

/// Counts whitespace tokens that are markup, links, runs of three or more
/// punctuation characters, or words missing from `vocabulary`.
pub fn count_malformed_tokens(text: &str, vocabulary: &Vocabulary) -> MalformedCount {
    let mut out = MalformedCount::default();
    for token in text.split_whitespace() {
        let Some(kind) = classify(token, vocabulary) else {
            continue;
        };
        out.total += 1;
        let c = &mut out.categories;
        match kind {
            Malformed::Html => c.html_markup += 1,
            Malformed::Link => c.link += 1,
            Malformed::Punctuation => c.excessive_punctuation += 1,
            Malformed::OutOfVocabulary => c.out_of_vocabulary += 1,
        }
    }
    out
}

/// Share of arguments with zero, one, and two or more malformed tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanlinessHistogram {
    pub zero: f64,
    pub one: f64,
    pub two_or_more: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanlinessReport {
    pub n_arguments: usize,
    pub per_argument: BTreeMap<String, usize>,
    pub histogram: CleanlinessHistogram,
    pub categories: CategoryCounts,
}

pub fn cleanliness_report(corpus: &Corpus, vocabulary: &Vocabulary) -> Result<CleanlinessReport> {
    let n = corpus.arguments().len();
    if n == 0 {
        return Err(Error::Empty("corpus has no arguments"));
    }
    let counts: Vec<(String, MalformedCount)> = corpus
        .arguments()
        .par_iter()
        .map(|a| (a.argument_id.clone(), count_malformed_tokens(&a.text, vocabulary)))
        .collect();
    let mut buckets = [0usize; 3];
    let mut categories = CategoryCounts::default();
    let mut per_argument = BTreeMap::new();
    for (id, c) in counts {
        buckets[c.total.min(2)] += 1;
        categories.add(&c.categories);
        per_argument.insert(id, c.total);
    }
    let frac = |k: usize| k as f64 / n as f64;
    Ok(CleanlinessReport {
        n_arguments: n,
        per_argument,
        histogram: CleanlinessHistogram {
            zero: frac(buckets[0]),
            one: frac(buckets[1]),
            two_or_more: frac(buckets[2]),
        },
        categories,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthProfile {
    pub n_arguments: usize,
    /// token count -> number of arguments
    pub histogram: BTreeMap<usize, usize>,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
    pub min: usize,
    pub max: usize,
}

pub fn length_profile(corpus: &Corpus) -> Result<LengthProfile> {
    let lengths: Vec<usize> = corpus.arguments().iter().map(|a| a.token_count).collect();
    if lengths.is_empty() {
        return Err(Error::Empty("corpus has no arguments"));
    }
    let mut histogram = BTreeMap::new();
    for &l in &lengths {
        *histogram.entry(l).or_insert(0) += 1;
    }
    let n = lengths.len() as f64;
    let mean = lengths.iter().sum::<usize>() as f64 / n;
    let var = lengths
        .iter()
        .map(|&l| (l as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(LengthProfile {
        n_arguments: lengths.len(),
        mean,
        stddev: var.sqrt(),
        min: *histogram.keys().next().unwrap(),
        max: *histogram.keys().next_back().unwrap(),
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Argument, Motion, Polarity};

    fn vocab(words: &[&str]) -> Vocabulary {
        Vocabulary::new(words.iter().copied(), true).unwrap()
    }

    fn corpus_of(texts: &[String]) -> Corpus {
        Corpus::new(
            vec![Motion {
                motion_id: "m".into(),
                text: "m".into(),
                concept: "c".into(),
                polarity: Polarity::ConPolicy,
            }],
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| Argument::new(format!("a{i}"), "m", t.clone(), None))
                .collect(),
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn clean_sentence() {
        let v = vocab(&["social", "media", "connects", "people"]);
        assert_eq!(count_malformed_tokens("Social media connects people.", &v).total, 0);
    }

    #[test]
    fn excessive_punctuation_token() {
        let v = vocab(&["really", "bad"]);
        let c = count_malformed_tokens("really?!?!? bad", &v);
        assert_eq!(c.total, 1);
        assert_eq!(c.categories.excessive_punctuation, 1);
    }

    #[test]
    fn one_token_per_category() {
        let v = vocab(&["see"]);
        let c = count_malformed_tokens("<br> see http://x.com zzxqy", &v);
        assert_eq!(c.total, 3);
        assert_eq!(
            c.categories,
            CategoryCounts {
                html_markup: 1,
                link: 1,
                excessive_punctuation: 0,
                out_of_vocabulary: 1
            }
        );
    }

    #[test]
    fn precedence_counts_a_token_once() {
        let v = vocab(&["x"]);
        let c = count_malformed_tokens("<b>!!! http://q.io!!!", &v);
        assert_eq!(c.total, 2);
        assert_eq!(c.categories.html_markup, 1);
        assert_eq!(c.categories.link, 1);
        let w = count_malformed_tokens("(www.example.org)", &v);
        assert_eq!(w.total, 1);
        assert_eq!(w.categories.link, 1);
    }

    #[test]
    fn lone_punctuation_is_not_a_word() {
        let v = vocab(&["yes"]);
        assert_eq!(count_malformed_tokens("yes - yes", &v).total, 0);
        assert_eq!(count_malformed_tokens("yes ... yes", &v).total, 1);
    }

    #[test]
    fn cased_lookup() {
        let v = Vocabulary::new(["Paris"], false).unwrap();
        assert_eq!(count_malformed_tokens("paris", &v).total, 1);
        assert_eq!(count_malformed_tokens("Paris,", &v).total, 0);
    }

    #[test]
    fn empty_vocabulary_rejected() {
        assert!(Vocabulary::new(Vec::<String>::new(), true).is_err());
    }

    #[test]
    fn histogram_over_four_arguments() {
        let v = vocab(&["ok"]);
        let texts: Vec<String> = ["ok ok", "ok", "ok zz", "zz qq"].iter().map(|s| s.to_string()).collect();
        let r = cleanliness_report(&corpus_of(&texts), &v).unwrap();
        assert_eq!(r.histogram.zero, 0.5);
        assert_eq!(r.histogram.one, 0.25);
        assert_eq!(r.histogram.two_or_more, 0.25);
        assert_eq!(r.categories.out_of_vocabulary, 3);
    }

    fn words(n: usize) -> String {
        vec!["w"; n].join(" ")
    }

    #[test]
    fn length_profile_examples() {
        let p = length_profile(&corpus_of(&[words(10), words(10), words(20)])).unwrap();
        assert_eq!(p.histogram, BTreeMap::from([(10, 2), (20, 1)]));
        assert!((p.mean - 40.0 / 3.0).abs() < 1e-12);

        let single = length_profile(&corpus_of(&[words(12)])).unwrap();
        assert_eq!(single.stddev, 0.0);

        let bounds = length_profile(&corpus_of(&[words(8), words(36)])).unwrap();
        assert_eq!((bounds.min, bounds.max), (8, 36));
    }
}
