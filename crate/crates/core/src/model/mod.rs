//! Classifiers and prediction plumbing.

mod baseline;
mod ensemble;
mod predictions;
mod schedule;
mod svm;

pub use baseline::{random_baseline, RANDOM_SOURCE};
pub use ensemble::{ensemble, EnsembleMode};
pub use predictions::{
    load_external_predictions, parse_predictions, write_predictions, PredictionRecord, THRESHOLD,
};
pub use schedule::{warmup_schedule, warmup_steps};
pub use svm::{
    hinge_objective, predict, train_linear_svm, train_with_report, LinearModel, TrainConfig,
    TrainReport, LINEAR_SOURCE,
};
