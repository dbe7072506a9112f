//! Tokenization, pair truncation and NLI input assembly.
//!
//! Tokens are contiguous alphanumeric runs or single non-whitespace symbols.
//! Truncation works on any slice so it stays independent of the tokenizer.

use std::fmt;
use std::ops::{Deref, Range};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";

/// Number of special markers added by [`assemble_nli_input`].
pub const SPECIAL_MARKERS: usize = 3;

/// Splits text into alphanumeric runs and single-character symbols.
///
/// Whitespace is dropped and case is preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word_start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            word_start.get_or_insert(i);
            continue;
        }
        if let Some(start) = word_start.take() {
            tokens.push(text[start..i].to_owned());
        }
        if !c.is_whitespace() {
            tokens.push(c.to_string());
        }
    }
    if let Some(start) = word_start {
        tokens.push(text[start..].to_owned());
    }
    tokens
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Tokens of one side of a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub side: Side,
}

impl TokenSequence {
    pub fn new(text: &str, side: Side) -> Self {
        TokenSequence {
            tokens: tokenize(text),
            side,
        }
    }

    /// Space-joined text; tokenizing it again gives back the same tokens.
    pub fn to_text(&self) -> String {
        self.tokens.join(" ")
    }
}

impl Deref for TokenSequence {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.tokens
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationStrategy {
    /// Keep the end of the left paragraph and the start of the right one.
    #[serde(rename = "transition")]
    TransitionFocused,
    LongestFirst,
}

impl FromStr for TruncationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transition" => Ok(TruncationStrategy::TransitionFocused),
            "longest_first" => Ok(TruncationStrategy::LongestFirst),
            other => Err(Error::Usage(format!(
                "unknown truncation strategy '{other}' (expected transition or longest_first)"
            ))),
        }
    }
}

impl fmt::Display for TruncationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruncationStrategy::TransitionFocused => "transition",
            TruncationStrategy::LongestFirst => "longest_first",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationConfig {
    /// Total tokens for both sides, excluding special markers.
    pub budget: usize,
    pub strategy: TruncationStrategy,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig {
            budget: 512,
            strategy: TruncationStrategy::TransitionFocused,
        }
    }
}

impl TruncationConfig {
    pub fn new(budget: usize, strategy: TruncationStrategy) -> Result<Self> {
        if budget < 2 {
            return Err(Error::Usage(format!(
                "truncation budget must be at least 2, got {budget}"
            )));
        }
        Ok(TruncationConfig { budget, strategy })
    }

    pub fn apply<'a, T>(&self, left: &'a [T], right: &'a [T]) -> (&'a [T], &'a [T]) {
        match self.strategy {
            TruncationStrategy::TransitionFocused => truncate_transition(left, right, self.budget),
            TruncationStrategy::LongestFirst => truncate_longest_first(left, right, self.budget),
        }
    }

    /// Tokenizes and truncates a pair, returning the kept text of each side.
    pub fn truncate_texts(&self, left: &str, right: &str) -> (String, String) {
        let left = tokenize(left);
        let right = tokenize(right);
        let (l, r) = self.apply(&left, &right);
        (l.join(" "), r.join(" "))
    }
}

/// Keeps the last `floor(budget/2)` tokens of `left` and the first
/// `ceil(budget/2)` tokens of `right`.
///
/// Each side is capped independently: budget left unused by a short side is
/// not handed to the other.
pub fn truncate_transition<'a, T>(left: &'a [T], right: &'a [T], budget: usize) -> (&'a [T], &'a [T]) {
    let left_cap = budget / 2;
    let right_cap = budget - left_cap;
    let left_start = left.len().saturating_sub(left_cap);
    (&left[left_start..], &right[..right.len().min(right_cap)])
}

/// Repeatedly drops the last token of the longer side (the right side on ties)
/// until both fit in `budget`.
pub fn truncate_longest_first<'a, T>(left: &'a [T], right: &'a [T], budget: usize) -> (&'a [T], &'a [T]) {
    let (l, r) = (left.len(), right.len());
    if l + r <= budget {
        return (left, right);
    }
    let excess = l + r - budget;
    let (keep_left, keep_right) = if l.abs_diff(r) >= excess {
        // only the longer side shrinks
        if l > r {
            (l - excess, r)
        } else {
            (l, r - excess)
        }
    } else {
        // both sides meet; ties trim the right first so left keeps the odd token
        (budget - budget / 2, budget / 2)
    };
    (&left[..keep_left], &right[..keep_right])
}

/// `[CLS] left [SEP] right [SEP]` with the spans of each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NliInput {
    pub tokens: Vec<String>,
    pub left_span: Range<usize>,
    pub right_span: Range<usize>,
}

impl NliInput {
    pub fn left(&self) -> &[String] {
        &self.tokens[self.left_span.clone()]
    }

    pub fn right(&self) -> &[String] {
        &self.tokens[self.right_span.clone()]
    }
}

/// Joins an already truncated pair. Fails if the pair exceeds `budget`.
pub fn assemble_nli_input(left: &[String], right: &[String], budget: usize) -> Result<NliInput> {
    if left.len() + right.len() > budget {
        return Err(Error::Usage(format!(
            "pair has {} tokens but the budget is {budget}; truncate first",
            left.len() + right.len()
        )));
    }
    let mut tokens = Vec::with_capacity(left.len() + right.len() + SPECIAL_MARKERS);
    tokens.push(CLS.to_owned());
    tokens.extend_from_slice(left);
    let left_span = 1..tokens.len();
    tokens.push(SEP.to_owned());
    let right_start = tokens.len();
    tokens.extend_from_slice(right);
    let right_span = right_start..tokens.len();
    tokens.push(SEP.to_owned());
    Ok(NliInput {
        tokens,
        left_span,
        right_span,
    })
}
