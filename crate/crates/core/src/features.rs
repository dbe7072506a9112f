//! TF-IDF vectors and surface counts for paragraph pairs.
//!
//! A pair is laid out as `[tfidf(left) | counts(left) | tfidf(right) | counts(right)]`
//! for a total width of `2 * (V + 5)`, where `V` is the vocabulary size.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::ParagraphPair;
use crate::error::{Error, Result};

const VOCABULARY_VERSION: u32 = 1;

/// Number of handcrafted slots per side.
pub const HANDCRAFTED_WIDTH: usize = 5;

static ENGLISH_STOPWORDS: &str = include_str!("../data/english_stopwords.txt");

/// The bundled English stopword list.
pub fn english_stopwords() -> BTreeSet<String> {
    parse_stopwords(ENGLISH_STOPWORDS)
}

/// One lowercase word per line; blank lines and `#` comments are skipped.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

/// Lowercased alphanumeric runs.
pub fn word_terms(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    pub entries: Vec<(usize, f64)>,
    pub dimension: usize,
}

impl SparseVector {
    pub fn zeros(dimension: usize) -> Self {
        SparseVector {
            entries: Vec::new(),
            dimension,
        }
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| dense[i] * w).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dimension];
        for &(i, w) in &self.entries {
            dense[i] = w;
        }
        dense
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|(_, w)| w.is_finite())
    }

    /// Appends `other` shifted past the current dimension.
    fn append(&mut self, other: &SparseVector) {
        let offset = self.dimension;
        self.entries
            .extend(other.entries.iter().map(|&(i, w)| (i + offset, w)));
        self.dimension += other.dimension;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<(String, usize)>,
    index: HashMap<String, usize>,
    document_count: usize,
    stopwords: BTreeSet<String>,
}

/// Fits a vocabulary of non-stopword terms over `texts`.
///
/// Column indices follow lexicographic term order.
pub fn fit_vocabulary<S: AsRef<str>>(texts: &[S], stopwords: &BTreeSet<String>) -> Result<Vocabulary> {
    if texts.is_empty() {
        return Err(Error::Usage("cannot fit a vocabulary on an empty corpus".into()));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for text in texts {
        let seen: BTreeSet<String> = word_terms(text.as_ref())
            .filter(|t| !stopwords.contains(t))
            .collect();
        for term in seen {
            *df.entry(term).or_default() += 1;
        }
    }
    Ok(Vocabulary::from_parts(
        df.into_iter().collect(),
        texts.len(),
        stopwords.clone(),
    ))
}

impl Vocabulary {
    fn from_parts(terms: Vec<(String, usize)>, document_count: usize, stopwords: BTreeSet<String>) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        Vocabulary {
            terms,
            index,
            document_count,
            stopwords,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn document_count(&self) -> usize {
        self.document_count
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.terms[i].1)
    }

    /// Terms in column order with their document frequencies.
    pub fn terms(&self) -> impl Iterator<Item = (&str, usize)> {
        self.terms.iter().map(|(t, df)| (t.as_str(), *df))
    }

    /// Smoothed inverse document frequency `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, column: usize) -> f64 {
        let n = self.document_count as f64;
        let df = self.terms[column].1 as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    /// Width of one pair's feature vector.
    pub fn pair_dimension(&self) -> usize {
        2 * (self.len() + HANDCRAFTED_WIDTH)
    }

    pub fn to_json(&self) -> String {
        let file = VocabularyFile {
            version: VOCABULARY_VERSION,
            document_count: self.document_count,
            terms: self
                .terms
                .iter()
                .enumerate()
                .map(|(i, (t, df))| (t.clone(), i, *df))
                .collect(),
            stopwords: self.stopwords.iter().cloned().collect(),
        };
        serde_json::to_string(&file).expect("vocabulary serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: VocabularyFile = serde_json::from_str(json)
            .map_err(|e| Error::Format(format!("vocabulary file: {e}")))?;
        if file.version != VOCABULARY_VERSION {
            return Err(Error::Format(format!(
                "unsupported vocabulary version {}",
                file.version
            )));
        }
        if file.document_count == 0 {
            return Err(Error::Format("vocabulary document_count must be positive".into()));
        }
        let mut terms = Vec::with_capacity(file.terms.len());
        for (expected, (term, index, df)) in file.terms.into_iter().enumerate() {
            if index != expected {
                return Err(Error::Format(format!(
                    "vocabulary term '{term}' has index {index}, expected {expected}"
                )));
            }
            if df == 0 || df > file.document_count {
                return Err(Error::Format(format!(
                    "vocabulary term '{term}' has invalid document frequency {df}"
                )));
            }
            terms.push((term, df));
        }
        let stopwords: BTreeSet<String> = file.stopwords.into_iter().collect();
        if let Some((t, _)) = terms.iter().find(|(t, _)| stopwords.contains(t)) {
            return Err(Error::Format(format!("stopword '{t}' appears as a term")));
        }
        Ok(Vocabulary::from_parts(terms, file.document_count, stopwords))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Vocabulary::from_json(&json).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    version: u32,
    document_count: usize,
    terms: Vec<(String, usize, usize)>,
    stopwords: Vec<String>,
}

/// L2-normalized TF-IDF vector of width `vocab.len()`. Out-of-vocabulary
/// terms are ignored; a text without known terms gives the zero vector.
pub fn tfidf_vector(text: &str, vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for term in word_terms(text) {
        if let Some(i) = vocab.index_of(&term) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let mut entries: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(i, tf)| (i, tf as f64 * vocab.idf(i)))
        .collect();
    let norm = entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, w) in &mut entries {
            *w /= norm;
        }
    }
    SparseVector {
        entries,
        dimension: vocab.len(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HandcraftedCounts {
    pub question_marks: usize,
    pub periods: usize,
    pub apostrophes: usize,
    /// `(` and `)` combined.
    pub parentheses: usize,
    pub word_count: usize,
}

pub fn handcrafted(text: &str) -> HandcraftedCounts {
    let mut counts = HandcraftedCounts::default();
    let mut in_word = false;
    for c in text.chars() {
        match c {
            '?' => counts.question_marks += 1,
            '.' => counts.periods += 1,
            '\'' => counts.apostrophes += 1,
            '(' | ')' => counts.parentheses += 1,
            _ => {}
        }
        let alnum = c.is_alphanumeric();
        if alnum && !in_word {
            counts.word_count += 1;
        }
        in_word = alnum;
    }
    counts
}

impl HandcraftedCounts {
    pub fn as_array(&self) -> [usize; HANDCRAFTED_WIDTH] {
        [
            self.question_marks,
            self.periods,
            self.apostrophes,
            self.parentheses,
            self.word_count,
        ]
    }

    /// Counts divided by `1 + word_count`.
    pub fn scaled(&self) -> SparseVector {
        let divisor = 1.0 + self.word_count as f64;
        let entries = self
            .as_array()
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(i, c)| (i, c as f64 / divisor))
            .collect();
        SparseVector {
            entries,
            dimension: HANDCRAFTED_WIDTH,
        }
    }
}

fn side_features(text: &str, vocab: &Vocabulary) -> SparseVector {
    let mut v = tfidf_vector(text, vocab);
    v.append(&handcrafted(text).scaled());
    v
}

/// Features for a pair of texts.
pub fn text_pair_features(left: &str, right: &str, vocab: &Vocabulary) -> SparseVector {
    let mut v = side_features(left, vocab);
    v.append(&side_features(right, vocab));
    v
}

pub fn pair_features(pair: &ParagraphPair, vocab: &Vocabulary) -> SparseVector {
    text_pair_features(&pair.left, &pair.right, vocab)
}
