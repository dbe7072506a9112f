//! Command implementations behind the `style-seam` binary.

pub mod commands;
pub mod config;

pub use config::{FileConfig, Overrides, RunConfig, DATASET_ENV};
