//! File formats, reports and the command-line pipeline around `fpvg-core`.
//!
//! The pipeline runs in stages, each reading and writing JSON Lines:
//! `prepare` assigns object relevance, `manifest` lists the object subsets
//! a model runner must evaluate, `evaluate` scores the runner's predictions,
//! `importance` scores importance rankings and `analyze` compares splits.
//! `synth` generates a synthetic world and model for end-to-end testing.

pub mod config;
pub mod error;
pub mod ingest;
pub mod output;
pub mod pipeline;
pub mod report;
pub mod wire;

pub use config::MetricConfig;
pub use error::{FpvgError, Result};
