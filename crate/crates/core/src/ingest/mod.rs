//! File formats and corpus loading.
//!
//! Arguments, judgments, pairs and every derived table are JSON Lines with a
//! fixed field order; motions are a tab-separated file with a header row.
//! Writing a loaded table back out reproduces canonical files byte for byte.

mod text;

pub use text::{
    cleanliness_report, count_malformed_tokens, length_profile, CategoryCounts,
    CleanlinessHistogram, CleanlinessReport, LengthProfile, MalformedCount, Vocabulary,
};

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{Answer, Argument, ArgumentPair, Channel, Judgment, Motion, Polarity, Stance};

pub const ARGUMENTS_FILE: &str = "arguments.jsonl";
pub const MOTIONS_FILE: &str = "motions.tsv";
pub const PAIRS_FILE: &str = "pairs.jsonl";
pub const JUDGMENTS_FILE: &str = "judgments.jsonl";

pub const MOTIONS_HEADER: &str = "motion_id\ttext\tconcept\tpolarity";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgumentRecord {
    pub argument_id: String,
    pub motion_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_stance: Option<Stance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgmentRecord {
    pub annotator_id: String,
    pub item_id: String,
    pub channel: Channel,
    pub answer: Answer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<Answer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub pair_id: String,
    pub motion_id: String,
    pub arg_a: String,
    pub arg_b: String,
}

impl From<&Argument> for ArgumentRecord {
    fn from(a: &Argument) -> Self {
        ArgumentRecord {
            argument_id: a.argument_id.clone(),
            motion_id: a.motion_id.clone(),
            text: a.text.clone(),
            gold_stance: a.gold_stance,
        }
    }
}

impl From<ArgumentRecord> for Argument {
    fn from(r: ArgumentRecord) -> Self {
        Argument::new(r.argument_id, r.motion_id, r.text, r.gold_stance)
    }
}

impl From<&Judgment> for JudgmentRecord {
    fn from(j: &Judgment) -> Self {
        JudgmentRecord {
            annotator_id: j.annotator_id.clone(),
            item_id: j.item_id.clone(),
            channel: j.channel,
            answer: j.answer,
            gold: j.gold,
        }
    }
}

impl From<JudgmentRecord> for Judgment {
    fn from(r: JudgmentRecord) -> Self {
        Judgment {
            annotator_id: r.annotator_id,
            item_id: r.item_id,
            channel: r.channel,
            answer: r.answer,
            gold: r.gold,
        }
    }
}

impl From<&ArgumentPair> for PairRecord {
    fn from(p: &ArgumentPair) -> Self {
        PairRecord {
            pair_id: p.pair_id.clone(),
            motion_id: p.motion_id.clone(),
            arg_a: p.arg_a.clone(),
            arg_b: p.arg_b.clone(),
        }
    }
}

impl From<PairRecord> for ArgumentPair {
    fn from(r: PairRecord) -> Self {
        ArgumentPair {
            pair_id: r.pair_id,
            motion_id: r.motion_id,
            arg_a: r.arg_a,
            arg_b: r.arg_b,
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads one JSON record per non-blank line, tagging each with its line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (idx, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg: e.to_string(),
        })?;
        out.push((idx + 1, record));
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(&r).map_err(|e| Error::Invalid(e.to_string()))?;
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_motions(path: &Path) -> Result<Vec<Motion>> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = open(path)?.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end_matches('\r') == MOTIONS_HEADER => {}
        Some((_, Ok(h))) => {
            return Err(parse_err(1, format!("expected header '{MOTIONS_HEADER}', got '{h}'")))
        }
        Some((_, Err(e))) => return Err(io_err(path)(e)),
        None => return Err(parse_err(1, "missing header".into())),
    }
    let mut motions = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(io_err(path))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, text, concept, polarity] = fields[..] else {
            return Err(parse_err(idx + 1, format!("expected 4 fields, got {}", fields.len())));
        };
        let polarity = Polarity::parse(polarity)
            .ok_or_else(|| parse_err(idx + 1, format!("unknown polarity '{polarity}'")))?;
        motions.push(Motion {
            motion_id: id.to_string(),
            text: text.to_string(),
            concept: concept.to_string(),
            polarity,
        });
    }
    Ok(motions)
}

pub fn write_motions(path: &Path, motions: &[Motion]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{MOTIONS_HEADER}").map_err(io_err(path))?;
    for m in motions {
        for field in [&m.motion_id, &m.text, &m.concept] {
            if field.contains(['\t', '\n', '\r']) {
                return Err(Error::Invalid(format!(
                    "motion '{}' field contains a tab or newline",
                    m.motion_id
                )));
            }
        }
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            m.motion_id,
            m.text,
            m.concept,
            m.polarity.as_str()
        )
        .map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_arguments(path: &Path) -> Result<Vec<Argument>> {
    Ok(read_jsonl::<ArgumentRecord>(path)?
        .into_iter()
        .map(|(_, r)| r.into())
        .collect())
}

pub fn read_pairs(path: &Path) -> Result<Vec<ArgumentPair>> {
    Ok(read_jsonl::<PairRecord>(path)?
        .into_iter()
        .map(|(_, r)| r.into())
        .collect())
}

/// Reads judgments, rejecting answers outside their channel's domain with
/// the offending line number.
pub fn read_judgments(path: &Path) -> Result<Vec<Judgment>> {
    read_jsonl::<JudgmentRecord>(path)?
        .into_iter()
        .map(|(line, r)| {
            if !r.answer.fits(r.channel) || r.gold.is_some_and(|g| !g.fits(r.channel)) {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("answer does not fit channel {}", r.channel),
                });
            }
            Ok(r.into())
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct CorpusPaths {
    pub arguments: PathBuf,
    pub motions: PathBuf,
    pub pairs: Option<PathBuf>,
    pub judgments: Vec<PathBuf>,
}

impl CorpusPaths {
    /// Standard file names inside `dir`; pairs and judgments only if present.
    pub fn in_dir(dir: &Path) -> Self {
        let optional = |name: &str| Some(dir.join(name)).filter(|p| p.exists());
        CorpusPaths {
            arguments: dir.join(ARGUMENTS_FILE),
            motions: dir.join(MOTIONS_FILE),
            pairs: optional(PAIRS_FILE),
            judgments: optional(JUDGMENTS_FILE).into_iter().collect(),
        }
    }
}

pub fn load_corpus(paths: &CorpusPaths) -> Result<Corpus> {
    let motions = read_motions(&paths.motions)?;
    let arguments = read_arguments(&paths.arguments)?;
    let pairs = match &paths.pairs {
        Some(p) => read_pairs(p)?,
        None => Vec::new(),
    };
    let mut judgments = Vec::new();
    for p in &paths.judgments {
        judgments.extend(read_judgments(p)?);
    }
    Corpus::new(motions, arguments, pairs, judgments)
}

/// Writes the canonical file set for `corpus` into `dir`. Pairs and
/// judgments files are only written when non-empty.
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> Result<CorpusPaths> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let paths = CorpusPaths {
        arguments: dir.join(ARGUMENTS_FILE),
        motions: dir.join(MOTIONS_FILE),
        pairs: (!corpus.pairs().is_empty()).then(|| dir.join(PAIRS_FILE)),
        judgments: if corpus.judgments().is_empty() {
            Vec::new()
        } else {
            vec![dir.join(JUDGMENTS_FILE)]
        },
    };
    write_motions(&paths.motions, corpus.motions())?;
    write_jsonl(
        &paths.arguments,
        corpus.arguments().iter().map(ArgumentRecord::from),
    )?;
    if let Some(p) = &paths.pairs {
        write_jsonl(p, corpus.pairs().iter().map(PairRecord::from))?;
    }
    if let Some(p) = paths.judgments.first() {
        write_jsonl(p, corpus.judgments().iter().map(JudgmentRecord::from))?;
    }
    Ok(paths)
}
