//! Linear SVM trained by mini-batch subgradient descent on the L2-regularized
//! hinge loss `lambda/2 * |w|^2 + mean(max(0, 1 - y (w.x + b)))`.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::predictions::PredictionRecord;
use super::schedule::warmup_schedule;
use crate::error::{Error, Result};
use crate::features::SparseVector;

const MODEL_VERSION: u32 = 1;

/// Source name attached to predictions of the TF-IDF linear model.
pub const LINEAR_SOURCE: &str = "tfidf_svc";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub peak_learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub warmup_ratio: f64,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            peak_learning_rate: 0.1,
            epochs: 5,
            batch_size: 4,
            warmup_ratio: 0.1,
            lambda: 1e-4,
            seed: 5000,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Usage(msg));
        if !(self.peak_learning_rate > 0.0 && self.peak_learning_rate.is_finite()) {
            return bad(format!("peak learning rate must be positive, got {}", self.peak_learning_rate));
        }
        if self.epochs == 0 {
            return bad("epochs must be positive".into());
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.warmup_ratio) {
            return bad(format!("warmup ratio must be in [0, 1], got {}", self.warmup_ratio));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if self.peak_learning_rate * self.lambda >= 1.0 {
            return bad("peak learning rate times lambda must be below 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
}

impl LinearModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn margin(&self, x: &SparseVector) -> Result<f64> {
        if x.dimension != self.dimension() {
            return Err(Error::Usage(format!(
                "feature dimension {} does not match model dimension {}",
                x.dimension,
                self.dimension()
            )));
        }
        Ok(x.dot_dense(&self.weights) + self.bias)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            version: MODEL_VERSION,
            dimension: self.dimension(),
            bias: self.bias,
            lambda: self.lambda,
            weights: self
                .weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(i, w)| (i, *w))
                .collect(),
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(json).map_err(|e| Error::Format(format!("model file: {e}")))?;
        if file.version != MODEL_VERSION {
            return Err(Error::Format(format!("unsupported model version {}", file.version)));
        }
        let mut weights = vec![0.0; file.dimension];
        for (i, w) in file.weights {
            if i >= file.dimension || !w.is_finite() {
                return Err(Error::Format(format!("invalid model weight at index {i}")));
            }
            weights[i] = w;
        }
        if !file.bias.is_finite() {
            return Err(Error::Format("model bias is not finite".into()));
        }
        Ok(LinearModel {
            weights,
            bias: file.bias,
            lambda: file.lambda,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        LinearModel::from_json(&json).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    dimension: usize,
    bias: f64,
    lambda: f64,
    weights: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Full-batch objective after each epoch.
    pub epoch_objectives: Vec<f64>,
    pub training_accuracy: f64,
    pub steps: usize,
}

impl TrainReport {
    pub fn final_objective(&self) -> f64 {
        *self.epoch_objectives.last().expect("at least one epoch")
    }
}

fn sign(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Regularized hinge objective over the full data set.
pub fn hinge_objective(model: &LinearModel, features: &[SparseVector], labels: &[u8]) -> f64 {
    let reg = 0.5 * model.lambda * model.weights.iter().map(|w| w * w).sum::<f64>();
    let loss: f64 = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| (1.0 - sign(y) * (x.dot_dense(&model.weights) + model.bias)).max(0.0))
        .sum();
    reg + loss / features.len() as f64
}

fn check_training_data(features: &[SparseVector], labels: &[u8]) -> Result<usize> {
    if features.len() != labels.len() {
        return Err(Error::Usage(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if let Some(bad) = labels.iter().find(|&&y| y > 1) {
        return Err(Error::Usage(format!("label {bad} is not binary")));
    }
    let ones = labels.iter().filter(|&&y| y == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(Error::Usage("training needs at least one example of each class".into()));
    }
    let dimension = features[0].dimension;
    for (i, x) in features.iter().enumerate() {
        if x.dimension != dimension {
            return Err(Error::Usage(format!(
                "feature vector {i} has dimension {}, expected {dimension}",
                x.dimension
            )));
        }
        if !x.is_finite() {
            return Err(Error::Data(format!("feature vector {i} has a non-finite weight")));
        }
    }
    Ok(dimension)
}

pub fn train_linear_svm(features: &[SparseVector], labels: &[u8], cfg: &TrainConfig) -> Result<LinearModel> {
    train_with_report(features, labels, cfg).map(|(model, _)| model)
}

/// Trains and records the full-batch objective at every epoch boundary.
///
/// Weights are kept as `scale * v` so the per-step shrinkage from the
/// regularizer costs O(1) instead of O(dimension).
pub fn train_with_report(
    features: &[SparseVector],
    labels: &[u8],
    cfg: &TrainConfig,
) -> Result<(LinearModel, TrainReport)> {
    cfg.validate()?;
    let dimension = check_training_data(features, labels)?;
    let n = features.len();
    let batches_per_epoch = n.div_ceil(cfg.batch_size);
    let total_steps = cfg.epochs * batches_per_epoch;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut v = vec![0.0; dimension];
    let mut scale = 1.0;
    let mut bias = 0.0;
    let mut violators = Vec::with_capacity(cfg.batch_size);
    let mut epoch_objectives = Vec::with_capacity(cfg.epochs);
    let mut step = 0;

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let lr = warmup_schedule(step, total_steps, cfg)?;
            violators.clear();
            violators.extend(batch.iter().copied().filter(|&i| {
                let y = sign(labels[i]);
                y * (scale * features[i].dot_dense(&v) + bias) < 1.0
            }));

            scale *= 1.0 - lr * cfg.lambda;
            if scale < 1e-9 {
                v.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
            let step_size = lr / batch.len() as f64;
            for &i in &violators {
                let y = sign(labels[i]);
                let coef = step_size * y / scale;
                for &(j, x) in &features[i].entries {
                    v[j] += coef * x;
                }
                bias += step_size * y;
            }
            step += 1;
        }
        let snapshot = LinearModel {
            weights: v.iter().map(|w| w * scale).collect(),
            bias,
            lambda: cfg.lambda,
        };
        epoch_objectives.push(hinge_objective(&snapshot, features, labels));
    }

    let model = LinearModel {
        weights: v.into_iter().map(|w| w * scale).collect(),
        bias,
        lambda: cfg.lambda,
    };
    let correct = features
        .iter()
        .zip(labels)
        .filter(|(x, &y)| {
            let m = x.dot_dense(&model.weights) + model.bias;
            u8::from(sigmoid(m) >= super::THRESHOLD) == y
        })
        .count();
    let report = TrainReport {
        epoch_objectives,
        training_accuracy: correct as f64 / n as f64,
        steps: total_steps,
    };
    Ok((model, report))
}

pub(crate) fn sigmoid(m: f64) -> f64 {
    if m >= 0.0 {
        1.0 / (1.0 + (-m).exp())
    } else {
        let e = m.exp();
        e / (1.0 + e)
    }
}

/// Scores one pair as `sigmoid(w.x + b)`.
pub fn predict(model: &LinearModel, doc_id: u64, pair_index: usize, x: &SparseVector) -> Result<PredictionRecord> {
    let m = model.margin(x)?;
    Ok(PredictionRecord::from_score(doc_id, pair_index, sigmoid(m), LINEAR_SOURCE))
}
