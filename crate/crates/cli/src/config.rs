//! Run configuration: CLI flags over an optional TOML file over built-in defaults.
//!
//! ```toml
//! seed = 5000
//!
//! [dataset]
//! root = "/data/pan23"
//! easy = "dataset1"        # directory name per difficulty
//!
//! [truncation]
//! strategy = "transition"  # or "longest_first"
//! budget = 512
//!
//! [train]
//! peak_lr = 0.1
//! epochs = 5
//! batch_size = 4
//! warmup_ratio = 0.1
//! lambda = 0.0001
//! stopwords = "stopwords.txt"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use style_seam::{Difficulty, Error, Split, TrainConfig, TruncationConfig, TruncationStrategy};

/// Dataset root fallback when neither a flag nor the config file names one.
pub const DATASET_ENV: &str = "STYLE_SEAM_DATASET";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub dataset: DatasetSection,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(default)]
    pub train: TrainSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub root: Option<PathBuf>,
    pub easy: Option<String>,
    pub medium: Option<String>,
    pub hard: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    pub strategy: Option<String>,
    pub budget: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub peak_lr: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub warmup_ratio: Option<f64>,
    pub lambda: Option<f64>,
    pub stopwords: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

/// Flag values as parsed; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub dataset_root: Option<PathBuf>,
    pub difficulty: Option<String>,
    pub split: Option<Split>,
    pub strategy: Option<String>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub warmup_ratio: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub peak_lr: Option<f64>,
    pub lambda: Option<f64>,
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset_root: Option<PathBuf>,
    pub difficulties: Vec<Difficulty>,
    /// `None` lets each command pick its default split.
    pub split: Option<Split>,
    pub truncation: TruncationConfig,
    pub train: TrainConfig,
    pub stopword_file: Option<PathBuf>,
    dir_names: [String; 3],
}

impl RunConfig {
    pub fn resolve(flags: Overrides, file: FileConfig, env_root: Option<PathBuf>) -> Result<Self, Error> {
        let difficulties = match flags.difficulty.as_deref().unwrap_or("all") {
            "all" => Difficulty::ALL.to_vec(),
            one => vec![one.parse()?],
        };

        let defaults = TruncationConfig::default();
        let strategy = match flags.strategy.or(file.truncation.strategy) {
            Some(s) => s.parse::<TruncationStrategy>()?,
            None => defaults.strategy,
        };
        let budget = flags.budget.or(file.truncation.budget).unwrap_or(defaults.budget);
        let truncation = TruncationConfig::new(budget, strategy)?;

        let d = TrainConfig::default();
        let train = TrainConfig {
            peak_learning_rate: flags.peak_lr.or(file.train.peak_lr).unwrap_or(d.peak_learning_rate),
            epochs: flags.epochs.or(file.train.epochs).unwrap_or(d.epochs),
            batch_size: flags.batch_size.or(file.train.batch_size).unwrap_or(d.batch_size),
            warmup_ratio: flags.warmup_ratio.or(file.train.warmup_ratio).unwrap_or(d.warmup_ratio),
            lambda: flags.lambda.or(file.train.lambda).unwrap_or(d.lambda),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
        };
        train.validate()?;

        let names = file.dataset;
        Ok(RunConfig {
            dataset_root: flags.dataset_root.or(names.root).or(env_root),
            difficulties,
            split: flags.split,
            truncation,
            train,
            stopword_file: flags.stopwords.or(file.train.stopwords),
            dir_names: [
                names.easy.unwrap_or_else(|| "easy".into()),
                names.medium.unwrap_or_else(|| "medium".into()),
                names.hard.unwrap_or_else(|| "hard".into()),
            ],
        })
    }

    pub fn dir_name(&self, difficulty: Difficulty) -> &str {
        &self.dir_names[difficulty as usize]
    }

    pub fn root(&self) -> Result<&Path, Error> {
        self.dataset_root.as_deref().ok_or_else(|| {
            Error::Usage(format!(
                "no dataset root: pass --dataset-root, set [dataset] root in the config file, or set {DATASET_ENV}"
            ))
        })
    }

    /// `<root>/<difficulty dir>/<split>`.
    pub fn split_dir(&self, difficulty: Difficulty, split: Split) -> Result<PathBuf, Error> {
        Ok(self.root()?.join(self.dir_name(difficulty)).join(split.dir_name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(Overrides::default(), FileConfig::default(), None).unwrap();
        assert_eq!(cfg.difficulties, Difficulty::ALL);
        assert_eq!(cfg.truncation, TruncationConfig::default());
        assert_eq!(cfg.train, TrainConfig::default());
        assert_eq!(cfg.train.seed, 5000);
        assert!(cfg.root().is_err());
    }

    #[test]
    fn flags_beat_file_beat_env() {
        let file: FileConfig = toml::from_str(
            r#"
            seed = 7
            [dataset]
            root = "/from/file"
            hard = "pan-hard"
            [truncation]
            strategy = "longest_first"
            budget = 128
            [train]
            epochs = 9
            "#,
        )
        .unwrap();
        let flags = Overrides {
            budget: Some(64),
            seed: Some(11),
            difficulty: Some("hard".into()),
            ..Overrides::default()
        };
        let cfg = RunConfig::resolve(flags, file, Some("/from/env".into())).unwrap();
        assert_eq!(cfg.truncation.budget, 64);
        assert_eq!(cfg.truncation.strategy, TruncationStrategy::LongestFirst);
        assert_eq!(cfg.train.seed, 11);
        assert_eq!(cfg.train.epochs, 9);
        assert_eq!(cfg.root().unwrap(), Path::new("/from/file"));
        assert_eq!(
            cfg.split_dir(Difficulty::Hard, Split::Validation).unwrap(),
            Path::new("/from/file/pan-hard/validation")
        );
    }

    #[test]
    fn env_is_last_resort() {
        let cfg = RunConfig::resolve(Overrides::default(), FileConfig::default(), Some("/env".into())).unwrap();
        assert_eq!(cfg.root().unwrap(), Path::new("/env"));
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let bad = |o: Overrides| RunConfig::resolve(o, FileConfig::default(), None).unwrap_err();
        assert!(matches!(bad(Overrides { budget: Some(1), ..Default::default() }), Error::Usage(_)));
        assert!(matches!(bad(Overrides { strategy: Some("middle".into()), ..Default::default() }), Error::Usage(_)));
        assert!(matches!(bad(Overrides { difficulty: Some("extreme".into()), ..Default::default() }), Error::Usage(_)));
        assert!(matches!(bad(Overrides { epochs: Some(0), ..Default::default() }), Error::Usage(_)));
    }

    #[test]
    fn unknown_config_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("[train]\nlearning_rate = 1.0").is_err());
    }
}
