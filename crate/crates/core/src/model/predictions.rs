//! Line-delimited JSON prediction exchange.
//!
//! Each line is `{"doc_id": 1, "pair_index": 0, "score": 0.9, "source": "m1"}`.
//! External models (fine-tuned encoders and the like) hand their softmax
//! scores to this crate through this format only.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scores at or above this are labeled 1.
pub const THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub doc_id: u64,
    pub pair_index: usize,
    pub score: f64,
    pub label: u8,
    pub source: String,
}

impl PredictionRecord {
    pub fn from_score(doc_id: u64, pair_index: usize, score: f64, source: impl Into<String>) -> Self {
        PredictionRecord {
            doc_id,
            pair_index,
            score,
            label: u8::from(score >= THRESHOLD),
            source: source.into(),
        }
    }

    pub fn key(&self) -> (u64, usize) {
        (self.doc_id, self.pair_index)
    }
}

#[derive(Serialize, Deserialize)]
struct WireRecord {
    doc_id: u64,
    pair_index: usize,
    score: f64,
    source: String,
}

/// Parses and validates records, then sorts them by `(doc_id, pair_index, source)`.
pub fn parse_predictions(text: &str, origin: &str) -> Result<Vec<PredictionRecord>> {
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = || format!("{origin}:{}", lineno + 1);
        let wire: WireRecord = serde_json::from_str(line)
            .map_err(|e| Error::Format(format!("{}: {e}", at())))?;
        if !(0.0..=1.0).contains(&wire.score) {
            return Err(Error::Format(format!(
                "{}: score {} is outside [0, 1]",
                at(),
                wire.score
            )));
        }
        if !seen.insert((wire.doc_id, wire.pair_index, wire.source.clone())) {
            return Err(Error::Format(format!(
                "{}: duplicate prediction for document {} pair {} from '{}'",
                at(),
                wire.doc_id,
                wire.pair_index,
                wire.source
            )));
        }
        records.push(PredictionRecord::from_score(
            wire.doc_id,
            wire.pair_index,
            wire.score,
            wire.source,
        ));
    }
    records.sort_by(|a, b| a.key().cmp(&b.key()).then_with(|| a.source.cmp(&b.source)));
    Ok(records)
}

pub fn load_external_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text, &path.display().to_string())
}

pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    let mut out = Vec::new();
    for r in records {
        let wire = WireRecord {
            doc_id: r.doc_id,
            pair_index: r.pair_index,
            score: r.score,
            source: r.source.clone(),
        };
        serde_json::to_writer(&mut out, &wire).expect("prediction serializes");
        out.push(b'\n');
    }
    fs::File::create(path)
        .and_then(|mut f| f.write_all(&out))
        .map_err(|e| Error::io(path, e))
}
