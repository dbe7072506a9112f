//! One function per subcommand. Each returns data for the caller to print and
//! writes its file artifacts itself.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use style_seam::features::{english_stopwords, load_stopwords, text_pair_features};
use style_seam::model::train_with_report;
use style_seam::{
    build_pairs, ensemble, fit_vocabulary, load_documents, load_external_predictions, load_solutions, load_split,
    load_truth, macro_f1, predict, random_baseline, write_predictions, write_solutions, Aggregation, Difficulty,
    Document, EnsembleMode, Error, LinearModel, ParagraphPair, PredictionRecord, ScoreReport, Split, SplitStats,
    Vocabulary,
};

use crate::config::RunConfig;

type Result<T> = std::result::Result<T, Error>;

pub const MODEL_FILE: &str = "model.json";
pub const VOCABULARY_FILE: &str = "vocabulary.json";
pub const PREDICTIONS_FILE: &str = "predictions.jsonl";
pub const STATS_FILE: &str = "stats.json";
pub const REPORT_FILE: &str = "report.json";

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn require_dir(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(Error::Usage(format!("directory {} does not exist", dir.display())))
    }
}

fn documents_in(dir: &Path, difficulty: Difficulty) -> Result<Vec<Document>> {
    require_dir(dir)?;
    let docs = load_documents(dir, difficulty)?;
    if docs.is_empty() {
        return Err(Error::Usage(format!("no problem-<N>.txt files in {}", dir.display())));
    }
    Ok(docs)
}

fn labeled_split(cfg: &RunConfig, difficulty: Difficulty, split: Split) -> Result<(Vec<Document>, Vec<ParagraphPair>)> {
    if !split.is_labeled() {
        return Err(Error::Usage(format!("the {split} split carries no labels")));
    }
    let dir = cfg.split_dir(difficulty, split)?;
    documents_in(&dir, difficulty)?;
    let (docs, truths) = load_split(&dir, difficulty)?;
    let pairs = build_pairs(&docs, Some(&truths))?;
    Ok((docs, pairs))
}

pub fn stats(cfg: &RunConfig, out: Option<&Path>) -> Result<Vec<SplitStats>> {
    let splits = match cfg.split {
        Some(split) => vec![split],
        None => vec![Split::Train, Split::Validation],
    };
    let mut all = Vec::new();
    for &difficulty in &cfg.difficulties {
        for &split in &splits {
            let (docs, pairs) = labeled_split(cfg, difficulty, split)?;
            all.push(SplitStats::from_split(difficulty, split, &docs, &pairs)?);
        }
    }
    if let Some(out) = out {
        create_dir(out)?;
        let json = serde_json::to_string_pretty(&all).expect("stats serialize");
        write_file(&out.join(STATS_FILE), &(json + "\n"))?;
    }
    Ok(all)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainSummary {
    pub difficulty: Difficulty,
    pub pairs: usize,
    pub vocabulary: usize,
    pub final_objective: f64,
    pub training_accuracy: f64,
}

impl fmt::Display for TrainSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: pairs {}, vocabulary {}, final objective {:.6}, training accuracy {:.4}",
            self.difficulty, self.pairs, self.vocabulary, self.final_objective, self.training_accuracy
        )
    }
}

/// Truncates each pair, then builds its feature vector.
fn pair_matrix(cfg: &RunConfig, pairs: &[ParagraphPair], vocab: &Vocabulary) -> Vec<style_seam::SparseVector> {
    pairs
        .iter()
        .map(|p| {
            let (left, right) = cfg.truncation.truncate_texts(&p.left, &p.right);
            text_pair_features(&left, &right, vocab)
        })
        .collect()
}

/// Fits a vocabulary and a linear model per difficulty into `<out>/<difficulty>/`.
pub fn train(cfg: &RunConfig, out: &Path) -> Result<Vec<TrainSummary>> {
    let split = cfg.split.unwrap_or(Split::Train);
    let stopwords = match &cfg.stopword_file {
        Some(path) => load_stopwords(path)?,
        None => english_stopwords(),
    };
    let mut summaries = Vec::new();
    for &difficulty in &cfg.difficulties {
        let (docs, pairs) = labeled_split(cfg, difficulty, split)?;
        let paragraphs: Vec<&str> = docs.iter().flat_map(|d| d.paragraphs.iter().map(String::as_str)).collect();
        let vocab = fit_vocabulary(&paragraphs, &stopwords)?;
        log::info!("{difficulty}: {} terms from {} paragraphs", vocab.len(), paragraphs.len());

        let features = pair_matrix(cfg, &pairs, &vocab);
        let labels: Vec<u8> = pairs.iter().map(|p| p.label.expect("labeled split")).collect();
        let (model, report) = train_with_report(&features, &labels, &cfg.train)?;

        let dir = out.join(difficulty.name());
        create_dir(&dir)?;
        vocab.save(&dir.join(VOCABULARY_FILE))?;
        model.save(&dir.join(MODEL_FILE))?;
        summaries.push(TrainSummary {
            difficulty,
            pairs: pairs.len(),
            vocabulary: vocab.len(),
            final_objective: report.final_objective(),
            training_accuracy: report.training_accuracy,
        });
    }
    Ok(summaries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictSummary {
    pub difficulty: Difficulty,
    pub predictions: usize,
    pub solutions: usize,
    pub dir: PathBuf,
}

impl fmt::Display for PredictSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} predictions, {} solution files in {}",
            self.difficulty,
            self.predictions,
            self.solutions,
            self.dir.display()
        )
    }
}

fn write_prediction_dir(difficulty: Difficulty, records: &[PredictionRecord], dir: PathBuf) -> Result<PredictSummary> {
    create_dir(&dir)?;
    write_predictions(&dir.join(PREDICTIONS_FILE), records)?;
    let solutions = write_solutions(records, &dir)?;
    Ok(PredictSummary {
        difficulty,
        predictions: records.len(),
        solutions,
        dir,
    })
}

fn unlabeled_pairs(cfg: &RunConfig, difficulty: Difficulty) -> Result<Vec<ParagraphPair>> {
    let split = cfg.split.unwrap_or(Split::Validation);
    let docs = documents_in(&cfg.split_dir(difficulty, split)?, difficulty)?;
    build_pairs(&docs, None)
}

/// Scores every pair of the selected split with the model saved by [`train`].
pub fn predict_with_model(cfg: &RunConfig, model_dir: &Path, out: &Path) -> Result<Vec<PredictSummary>> {
    let mut summaries = Vec::new();
    for &difficulty in &cfg.difficulties {
        let dir = model_dir.join(difficulty.name());
        let vocab = Vocabulary::load(&dir.join(VOCABULARY_FILE))?;
        let model = LinearModel::load(&dir.join(MODEL_FILE))?;
        if vocab.pair_dimension() != model.dimension() {
            return Err(Error::Usage(format!(
                "{}: vocabulary yields {} features but the model expects {}",
                dir.display(),
                vocab.pair_dimension(),
                model.dimension()
            )));
        }
        let pairs = unlabeled_pairs(cfg, difficulty)?;
        let features = pair_matrix(cfg, &pairs, &vocab);
        let records = pairs
            .iter()
            .zip(&features)
            .map(|(p, x)| predict(&model, p.doc_id, p.pair_index, x))
            .collect::<Result<Vec<_>>>()?;
        summaries.push(write_prediction_dir(difficulty, &records, out.join(difficulty.name()))?);
    }
    Ok(summaries)
}

pub fn random(cfg: &RunConfig, out: &Path) -> Result<Vec<PredictSummary>> {
    let mut summaries = Vec::new();
    for &difficulty in &cfg.difficulties {
        let pairs = unlabeled_pairs(cfg, difficulty)?;
        let records = random_baseline(&pairs, cfg.train.seed);
        summaries.push(write_prediction_dir(difficulty, &records, out.join(difficulty.name()))?);
    }
    Ok(summaries)
}

/// Solutions live in `<predictions>/<difficulty>/`, or directly in
/// `<predictions>` when a single difficulty is scored.
fn solution_dir(cfg: &RunConfig, predictions: &Path, difficulty: Difficulty) -> Result<PathBuf> {
    let nested = predictions.join(difficulty.name());
    if nested.is_dir() {
        return Ok(nested);
    }
    if cfg.difficulties.len() == 1 {
        require_dir(predictions)?;
        return Ok(predictions.to_path_buf());
    }
    Err(Error::Usage(format!("directory {} does not exist", nested.display())))
}

pub fn evaluate(
    cfg: &RunConfig,
    predictions: &Path,
    truth: Option<&Path>,
    aggregation: Aggregation,
    out: Option<&Path>,
) -> Result<ScoreReport> {
    if truth.is_some() && cfg.difficulties.len() != 1 {
        return Err(Error::Usage("--truth needs a single --difficulty".into()));
    }
    let split = cfg.split.unwrap_or(Split::Validation);
    let mut report = ScoreReport::default();
    for &difficulty in &cfg.difficulties {
        let truth_dir = match truth {
            Some(dir) => dir.to_path_buf(),
            None => cfg.split_dir(difficulty, split)?,
        };
        require_dir(&truth_dir)?;
        let gold = style_seam::eval::gold_by_doc(&load_truth(&truth_dir)?);
        if gold.is_empty() {
            return Err(Error::Usage(format!("no truth-problem-<N>.json files in {}", truth_dir.display())));
        }
        let pred = load_solutions(&solution_dir(cfg, predictions, difficulty)?)?;
        let entry = macro_f1(&gold, &pred, aggregation)
            .map_err(|e| Error::Usage(format!("{difficulty}: {e}")))?;
        report.0.insert(difficulty.name().to_string(), entry);
    }
    if let Some(out) = out {
        create_dir(out)?;
        write_file(&out.join(REPORT_FILE), &(report.to_json() + "\n"))?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleSummary {
    pub members: usize,
    pub predictions: usize,
    pub solutions: usize,
}

impl fmt::Display for EnsembleSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} members: {} predictions, {} solution files",
            self.members, self.predictions, self.solutions
        )
    }
}

/// Combines prediction files into `<out>/predictions.jsonl` plus solution files.
pub fn combine(files: &[PathBuf], mode: EnsembleMode, out: &Path) -> Result<EnsembleSummary> {
    let members = files
        .iter()
        .map(|f| load_external_predictions(f))
        .collect::<Result<Vec<_>>>()?;
    let combined = ensemble(&members, mode)?;
    create_dir(out)?;
    write_predictions(&out.join(PREDICTIONS_FILE), &combined)?;
    let solutions = write_solutions(&combined, out)?;
    Ok(EnsembleSummary {
        members: members.len(),
        predictions: combined.len(),
        solutions,
    })
}
