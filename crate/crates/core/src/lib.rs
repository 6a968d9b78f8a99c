//! Faithful & plausible visual grounding (FPVG) metrics for object-based
//! visual question answering models.
//!
//! The crate is `no_std` (with `alloc`) and contains only the algorithmic
//! parts of the toolkit:
//!
//! - [`geometry`]: bounding-box overlap arithmetic.
//! - [`relevance`]: partition of detected objects into relevant, irrelevant
//!   and neither, plus question eligibility.
//! - [`manifest`]: object-index lists for the `all` / `rel` / `irrel` test
//!   conditions and leave-one-out variants.
//! - [`metrics`]: per-question FPVG categorization, aggregation,
//!   sufficiency / comprehensiveness and flip-rate analyses.
//! - [`importance`]: ranking-match scores for object-importance vectors.
//! - [`analysis`]: correct-to-incorrect ratios and split comparisons.
//! - [`synthetic`]: worlds and reference models with known FPVG outcomes.
//!
//! File formats, reports and the command-line interface live in the `fpvg`
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod answer;
mod error;
pub mod geometry;
pub mod importance;
pub mod manifest;
pub mod metrics;
pub mod ratio;
pub mod record;
pub mod relevance;
pub mod synthetic;

pub use answer::AnswerEq;
pub use error::Error;
pub use geometry::BoundingBox;
pub use manifest::{Condition, Manifest};
pub use ratio::Ratio;
pub use record::{DetectionSet, ImportanceVector, PredictionRecord, PredictionRun, QuestionRecord};
pub use relevance::{RelevanceAssignment, RelevanceConfig};

pub type Result<T, E = Error> = core::result::Result<T, E>;
