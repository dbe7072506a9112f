//! PAN-format dataset loading.
//!
//! A split directory holds `problem-<N>.txt` documents (one paragraph per line)
//! and, for labeled splits, `truth-problem-<N>.json` files of the form
//! `{"authors": 2, "changes": [1, 0]}`. Each document with `P` paragraphs yields
//! `P - 1` [`ParagraphPair`]s, one per paragraph boundary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

const PROBLEM_PREFIX: &str = "problem-";
const TRUTH_PREFIX: &str = "truth-problem-";
const SOLUTION_PREFIX: &str = "solution-problem-";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Difficulty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(Difficulty::Easy),
            "medium" => Ok(Difficulty::Medium),
            "hard" => Ok(Difficulty::Hard),
            other => Err(Error::Usage(format!("unknown difficulty '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn dir_name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }

    pub fn is_labeled(self) -> bool {
        !matches!(self, Split::Test)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dir_name())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::Usage(format!("unknown split '{other}'"))),
        }
    }
}

/// A document as an ordered list of nonempty paragraphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: u64,
    pub difficulty: Difficulty,
    pub paragraphs: Vec<String>,
}

impl Document {
    /// Builds a document from raw file content.
    pub fn parse(id: u64, difficulty: Difficulty, text: &str) -> Result<Self> {
        let paragraphs = split_paragraphs(text);
        if paragraphs.is_empty() {
            return Err(Error::Format(format!(
                "document {id} contains no nonempty paragraphs"
            )));
        }
        Ok(Document {
            id,
            difficulty,
            paragraphs,
        })
    }

    pub fn pair_count(&self) -> usize {
        self.paragraphs.len().saturating_sub(1)
    }
}

/// Splits on `\n`, strips a trailing `\r` and drops empty segments.
pub fn split_paragraphs(text: &str) -> Vec<String> {
    text.split('\n')
        .map(|line| line.strip_suffix('\r').unwrap_or(line))
        .filter(|line| !line.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Gold labels for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRecord {
    pub doc_id: u64,
    pub authors: u32,
    pub changes: Vec<u8>,
}

impl TruthRecord {
    /// Parses the JSON body of a `truth-problem-<N>.json` file.
    pub fn parse(doc_id: u64, json: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(json)
            .map_err(|e| Error::Format(format!("truth for document {doc_id}: {e}")))?;
        let authors = value
            .get("authors")
            .and_then(Value::as_u64)
            .filter(|&a| a >= 1 && a <= u64::from(u32::MAX))
            .ok_or_else(|| {
                Error::Format(format!(
                    "truth for document {doc_id}: \"authors\" must be a positive integer"
                ))
            })?;
        let changes = parse_changes(&value, &format!("truth for document {doc_id}"))?;
        Ok(TruthRecord {
            doc_id,
            authors: authors as u32,
            changes,
        })
    }
}

/// Reads the `"changes"` array of a truth or solution object.
pub(crate) fn parse_changes(value: &Value, context: &str) -> Result<Vec<u8>> {
    let array = value
        .get("changes")
        .ok_or_else(|| Error::Format(format!("{context}: missing \"changes\" key")))?
        .as_array()
        .ok_or_else(|| Error::Format(format!("{context}: \"changes\" is not an array")))?;
    array
        .iter()
        .enumerate()
        .map(|(i, v)| match v.as_u64() {
            Some(0) => Ok(0),
            Some(1) => Ok(1),
            _ => Err(Error::Format(format!(
                "{context}: changes[{i}] = {v} is not 0 or 1"
            ))),
        })
        .collect()
}

/// One consecutive-paragraph transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParagraphPair {
    pub doc_id: u64,
    pub pair_index: usize,
    pub left: String,
    pub right: String,
    /// `None` for unlabeled (test) data.
    pub label: Option<u8>,
}

/// Extracts `N` from `<prefix>N<suffix>`, requiring `N` to be all ASCII digits.
fn numbered_stem(file_name: &str, prefix: &str, suffix: &str) -> Option<u64> {
    let digits = file_name.strip_prefix(prefix)?.strip_suffix(suffix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Artifacts the command-line tools may leave next to dataset files.
const KNOWN_ARTIFACTS: &[&str] = &[
    "predictions.jsonl",
    "report.json",
    "stats.json",
    "model.json",
    "vocabulary.json",
];

fn is_known_sibling(name: &str) -> bool {
    KNOWN_ARTIFACTS.contains(&name)
        || numbered_stem(name, PROBLEM_PREFIX, ".txt").is_some()
        || numbered_stem(name, TRUTH_PREFIX, ".json").is_some()
        || numbered_stem(name, SOLUTION_PREFIX, ".json").is_some()
}

/// Lists `<prefix>N<suffix>` files in `dir`, sorted by `N`.
pub(crate) fn scan_numbered(dir: &Path, prefix: &str, suffix: &str) -> Result<Vec<(u64, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else {
            log::warn!("ignoring non UTF-8 file name in {}", dir.display());
            continue;
        };
        match numbered_stem(name, prefix, suffix) {
            Some(id) => {
                if let Some(previous) = found.insert(id, entry.path()) {
                    return Err(Error::Format(format!(
                        "id {id} appears twice in {}: {} and {name}",
                        dir.display(),
                        previous.display()
                    )));
                }
            }
            None if is_known_sibling(name) => {}
            None => log::warn!("ignoring unexpected file {}", entry.path().display()),
        }
    }
    Ok(found.into_iter().collect())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads every `problem-<N>.txt` in `dir`, ordered by ascending `N`.
pub fn load_documents(dir: &Path, difficulty: Difficulty) -> Result<Vec<Document>> {
    scan_numbered(dir, PROBLEM_PREFIX, ".txt")?
        .into_iter()
        .map(|(id, path)| {
            let text = read_text(&path)?;
            Document::parse(id, difficulty, &text)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
        })
        .collect()
}

/// Loads every `truth-problem-<N>.json` in `dir`, ordered by ascending `N`.
pub fn load_truth(dir: &Path) -> Result<Vec<TruthRecord>> {
    scan_numbered(dir, TRUTH_PREFIX, ".json")?
        .into_iter()
        .map(|(id, path)| TruthRecord::parse(id, &read_text(&path)?))
        .collect()
}

/// Checks that documents and truths correspond one-to-one with matching lengths.
pub fn check_truths(docs: &[Document], truths: &[TruthRecord]) -> Result<()> {
    let by_id: BTreeMap<u64, &TruthRecord> = truths.iter().map(|t| (t.doc_id, t)).collect();
    for doc in docs {
        let truth = by_id
            .get(&doc.id)
            .ok_or_else(|| Error::Format(format!("document {} has no truth record", doc.id)))?;
        if truth.changes.len() != doc.pair_count() {
            return Err(Error::Format(format!(
                "document {}: truth has {} changes but document has {} paragraphs",
                doc.id,
                truth.changes.len(),
                doc.paragraphs.len()
            )));
        }
    }
    let doc_ids: BTreeSet<u64> = docs.iter().map(|d| d.id).collect();
    if let Some(orphan) = truths.iter().find(|t| !doc_ids.contains(&t.doc_id)) {
        return Err(Error::Format(format!(
            "truth record {} has no matching document",
            orphan.doc_id
        )));
    }
    Ok(())
}

/// Loads a labeled split directory and cross-validates documents against truths.
pub fn load_split(dir: &Path, difficulty: Difficulty) -> Result<(Vec<Document>, Vec<TruthRecord>)> {
    let docs = load_documents(dir, difficulty)?;
    let truths = load_truth(dir)?;
    check_truths(&docs, &truths)?;
    Ok((docs, truths))
}

/// Emits `P - 1` pairs per document in order.
///
/// With `truths` absent every label is `None`.
pub fn build_pairs(docs: &[Document], truths: Option<&[TruthRecord]>) -> Result<Vec<ParagraphPair>> {
    if let Some(truths) = truths {
        check_truths(docs, truths)?;
    }
    let by_id: BTreeMap<u64, &TruthRecord> = truths
        .unwrap_or_default()
        .iter()
        .map(|t| (t.doc_id, t))
        .collect();
    let mut pairs = Vec::with_capacity(docs.iter().map(Document::pair_count).sum());
    for doc in docs {
        let changes = by_id.get(&doc.id).map(|t| &t.changes);
        for (i, window) in doc.paragraphs.windows(2).enumerate() {
            pairs.push(ParagraphPair {
                doc_id: doc.id,
                pair_index: i,
                left: window[0].clone(),
                right: window[1].clone(),
                label: changes.map(|c| c[i]),
            });
        }
    }
    Ok(pairs)
}

/// Label counts over a set of pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub pairs: usize,
    pub zeros: usize,
    pub ones: usize,
}

pub fn compute_stats(pairs: &[ParagraphPair]) -> Result<LabelCounts> {
    let mut counts = LabelCounts::default();
    for pair in pairs {
        match pair.label {
            Some(0) => counts.zeros += 1,
            Some(_) => counts.ones += 1,
            None => {
                return Err(Error::Usage(format!(
                    "pair {} of document {} is unlabeled",
                    pair.pair_index, pair.doc_id
                )))
            }
        }
        counts.pairs += 1;
    }
    Ok(counts)
}

/// Document and label counts for one (difficulty, split).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStats {
    pub difficulty: Difficulty,
    pub split: Split,
    pub documents: usize,
    #[serde(flatten)]
    pub labels: LabelCounts,
}

impl SplitStats {
    pub fn from_split(
        difficulty: Difficulty,
        split: Split,
        docs: &[Document],
        pairs: &[ParagraphPair],
    ) -> Result<Self> {
        Ok(SplitStats {
            difficulty,
            split,
            documents: docs.len(),
            labels: compute_stats(pairs)?,
        })
    }
}

impl fmt::Display for SplitStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}: docs {}, pairs {}, zeros {}, ones {}",
            self.difficulty,
            self.split,
            self.documents,
            self.labels.pairs,
            self.labels.zeros,
            self.labels.ones
        )
    }
}
