//! Paragraph-level writing style change detection.
//!
//! Documents are split into consecutive paragraph pairs, each labeled 1 when the
//! author changes across the boundary and 0 otherwise. The crate covers the whole
//! non-neural pipeline around that formulation:
//!
//! - [`corpus`]: PAN-format dataset loading, pair construction and label statistics.
//! - [`tokenize`]: rule-based tokenization, transition-focused and longest-first
//!   truncation, and `[CLS] left [SEP] right [SEP]` input assembly.
//! - [`features`]: TF-IDF vocabulary and handcrafted punctuation counts per pair.
//! - [`model`]: warmup schedule, linear SVM, random baseline, prediction exchange
//!   files and ensembling.
//! - [`eval`]: per-class, macro and weighted F1 plus solution file output.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod model;
pub mod tokenize;

pub use corpus::{
    build_pairs, check_truths, compute_stats, load_documents, load_split, load_truth, Difficulty, Document,
    LabelCounts, ParagraphPair, Split, SplitStats, TruthRecord,
};
pub use error::{Error, Result};
pub use eval::{
    f1_per_class, load_solutions, macro_f1, write_solutions, Aggregation, ConfusionCounts,
    ScoreEntry, ScoreReport,
};
pub use features::{
    fit_vocabulary, handcrafted, pair_features, tfidf_vector, HandcraftedCounts, SparseVector,
    Vocabulary,
};
pub use model::{
    ensemble, load_external_predictions, predict, random_baseline, train_linear_svm,
    warmup_schedule, write_predictions, EnsembleMode, LinearModel, PredictionRecord, TrainConfig,
    TrainReport,
};
pub use tokenize::{
    assemble_nli_input, tokenize, truncate_longest_first, truncate_transition, NliInput, Side,
    TokenSequence, TruncationConfig, TruncationStrategy,
};
