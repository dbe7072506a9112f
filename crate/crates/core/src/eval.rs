//! Scoring against gold labels.
//!
//! By default all pairs of a difficulty split are pooled into one flat label
//! vector before per-class F1 is computed, which is how the shared task's
//! official evaluator aggregates. A class with no gold and no predicted
//! instances scores F1 = 0.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{parse_changes, scan_numbered, TruthRecord};
use crate::error::{Error, Result};
use crate::model::PredictionRecord;

const SOLUTION_PREFIX: &str = "solution-problem-";

/// Confusion counts with `positive` as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
}

impl ConfusionCounts {
    pub fn from_labels(gold: &[u8], pred: &[u8], positive: u8) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::Usage(format!(
                "{} gold labels but {} predictions",
                gold.len(),
                pred.len()
            )));
        }
        let mut c = ConfusionCounts::default();
        for (&g, &p) in gold.iter().zip(pred) {
            match (g == positive, p == positive) {
                (true, true) => c.true_positives += 1,
                (false, true) => c.false_positives += 1,
                (true, false) => c.false_negatives += 1,
                (false, false) => c.true_negatives += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.false_negatives + self.true_negatives
    }

    pub fn f1(&self) -> f64 {
        let tp = self.true_positives as f64;
        let predicted = (self.true_positives + self.false_positives) as f64;
        let actual = (self.true_positives + self.false_negatives) as f64;
        let precision = if predicted > 0.0 { tp / predicted } else { 0.0 };
        let recall = if actual > 0.0 { tp / actual } else { 0.0 };
        if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        }
    }
}

pub fn f1_per_class(gold: &[u8], pred: &[u8], positive: u8) -> Result<f64> {
    if gold.is_empty() {
        return Err(Error::Usage("cannot score an empty label vector".into()));
    }
    Ok(ConfusionCounts::from_labels(gold, pred, positive)?.f1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// One flat vector per split.
    #[default]
    Pooled,
    /// Mean of per-document scores.
    PerDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub f1_class0: f64,
    pub f1_class1: f64,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    pub pairs: usize,
    pub documents: usize,
}

impl ScoreEntry {
    /// Pooled scores for flat label vectors.
    pub fn from_flat(gold: &[u8], pred: &[u8], documents: usize) -> Result<Self> {
        let f1_class0 = f1_per_class(gold, pred, 0)?;
        let f1_class1 = f1_per_class(gold, pred, 1)?;
        let n1 = gold.iter().filter(|&&g| g == 1).count() as f64;
        let n0 = gold.len() as f64 - n1;
        Ok(ScoreEntry {
            f1_class0,
            f1_class1,
            macro_f1: (f1_class0 + f1_class1) / 2.0,
            weighted_f1: (n0 * f1_class0 + n1 * f1_class1) / (n0 + n1),
            pairs: gold.len(),
            documents,
        })
    }
}

fn coverage_check(gold: &BTreeMap<u64, Vec<u8>>, pred: &BTreeMap<u64, Vec<u8>>) -> Result<()> {
    let mut problems = Vec::new();
    for (doc, labels) in gold {
        match pred.get(doc) {
            None if labels.is_empty() => {}
            None => problems.push(format!("document {doc}: no prediction")),
            Some(p) if p.len() < labels.len() => problems.push(format!(
                "document {doc}: missing pairs {:?}",
                (p.len()..labels.len()).collect::<Vec<_>>()
            )),
            Some(p) if p.len() > labels.len() => problems.push(format!(
                "document {doc}: unexpected pairs {:?}",
                (labels.len()..p.len()).collect::<Vec<_>>()
            )),
            Some(_) => {}
        }
    }
    for doc in pred.keys().filter(|d| !gold.contains_key(d)) {
        problems.push(format!("document {doc}: prediction without gold labels"));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Coverage(problems.join("; ")))
    }
}

/// Scores one difficulty split.
pub fn macro_f1(
    gold_by_doc: &BTreeMap<u64, Vec<u8>>,
    pred_by_doc: &BTreeMap<u64, Vec<u8>>,
    aggregation: Aggregation,
) -> Result<ScoreEntry> {
    coverage_check(gold_by_doc, pred_by_doc)?;
    let documents = gold_by_doc.len();
    match aggregation {
        Aggregation::Pooled => {
            let gold: Vec<u8> = gold_by_doc.values().flatten().copied().collect();
            let pred: Vec<u8> = pred_by_doc.values().flatten().copied().collect();
            ScoreEntry::from_flat(&gold, &pred, documents)
        }
        Aggregation::PerDocument => {
            let entries = gold_by_doc
                .iter()
                .filter(|(_, g)| !g.is_empty())
                .map(|(doc, g)| ScoreEntry::from_flat(g, &pred_by_doc[doc], 1))
                .collect::<Result<Vec<_>>>()?;
            if entries.is_empty() {
                return Err(Error::Usage("cannot score an empty label vector".into()));
            }
            let mean = |f: fn(&ScoreEntry) -> f64| entries.iter().map(f).sum::<f64>() / entries.len() as f64;
            Ok(ScoreEntry {
                f1_class0: mean(|e| e.f1_class0),
                f1_class1: mean(|e| e.f1_class1),
                macro_f1: mean(|e| e.macro_f1),
                weighted_f1: mean(|e| e.weighted_f1),
                pairs: entries.iter().map(|e| e.pairs).sum(),
                documents,
            })
        }
    }
}

/// Scores keyed by difficulty name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScoreReport(pub BTreeMap<String, ScoreEntry>);

impl ScoreReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for ScoreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>6}",
            "difficulty", "f1_0", "f1_1", "macro", "weighted", "pairs", "docs"
        )?;
        for (name, e) in &self.0 {
            writeln!(
                f,
                "{:<10} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8} {:>6}",
                name, e.f1_class0, e.f1_class1, e.macro_f1, e.weighted_f1, e.pairs, e.documents
            )?;
        }
        Ok(())
    }
}

pub fn gold_by_doc(truths: &[TruthRecord]) -> BTreeMap<u64, Vec<u8>> {
    truths.iter().map(|t| (t.doc_id, t.changes.clone())).collect()
}

/// Groups labels by document, requiring pair indices `0..k` without gaps or repeats.
pub fn labels_by_doc(predictions: &[PredictionRecord]) -> Result<BTreeMap<u64, Vec<u8>>> {
    let mut grouped: BTreeMap<u64, BTreeMap<usize, u8>> = BTreeMap::new();
    for r in predictions {
        if grouped
            .entry(r.doc_id)
            .or_default()
            .insert(r.pair_index, r.label)
            .is_some()
        {
            return Err(Error::Usage(format!(
                "document {} pair {} predicted twice",
                r.doc_id, r.pair_index
            )));
        }
    }
    grouped
        .into_iter()
        .map(|(doc, pairs)| {
            if let Some((pos, (&index, _))) = pairs.iter().enumerate().find(|(pos, (&i, _))| *pos != i) {
                return Err(Error::Usage(format!(
                    "document {doc}: pair indices have a gap before {index} (expected {pos})"
                )));
            }
            Ok((doc, pairs.into_values().collect()))
        })
        .collect()
}

/// Renders `{"changes": [1, 0]}`.
pub fn solution_json(changes: &[u8]) -> String {
    let labels: Vec<String> = changes.iter().map(u8::to_string).collect();
    format!("{{\"changes\": [{}]}}", labels.join(", "))
}

/// Writes one `solution-problem-<N>.json` per document and returns the file count.
pub fn write_solutions(predictions: &[PredictionRecord], out_dir: &Path) -> Result<usize> {
    let by_doc = labels_by_doc(predictions)?;
    if by_doc.is_empty() {
        return Ok(0);
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for (doc, labels) in &by_doc {
        let path = out_dir.join(format!("{SOLUTION_PREFIX}{doc}.json"));
        fs::write(&path, solution_json(labels)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(by_doc.len())
}

/// Reads every `solution-problem-<N>.json` in `dir`.
pub fn load_solutions(dir: &Path) -> Result<BTreeMap<u64, Vec<u8>>> {
    scan_numbered(dir, SOLUTION_PREFIX, ".json")?
        .into_iter()
        .map(|(id, path)| {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            Ok((id, parse_changes(&value, &path.display().to_string())?))
        })
        .collect()
}
