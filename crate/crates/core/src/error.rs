use alloc::string::String;
use core::fmt;

/// Errors raised by the metric core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Box with non-finite corners or non-positive width/height.
    InvalidBox { x1: f64, y1: f64, x2: f64, y2: f64 },
    /// A threshold or probability parameter outside its allowed range.
    InvalidParameter { name: &'static str, value: f64 },
    /// Detections were paired with a question about a different image.
    ImageMismatch { question_image: String, detection_image: String },
    /// Condition manifests or ranking scores requested for an ineligible question.
    NotEligible { question_id: String },
    /// A question has no record in one of the prediction runs.
    MissingPrediction { run_label: String, question_id: String },
    /// Aggregation over zero evaluated questions.
    EmptyEvaluation,
    /// An importance vector or LOO run list whose length differs from the object count.
    LengthMismatch { question_id: String, expected: usize, found: usize },
    /// The probability of the reference class could not be read from a record.
    MissingProbability { question_id: String, run_label: String },
    /// Reports compared across splits were produced with different configurations.
    ConfigMismatch { expected: String, found: String, split: String },
    /// Split comparison needs at least two labeled reports.
    TooFewSplits { found: usize },
    /// Synthetic world configuration that cannot be generated.
    InfeasibleWorld(&'static str),
    /// A manifest refers to a question absent from the world.
    UnknownQuestion { question_id: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidBox { x1, y1, x2, y2 } => {
                write!(f, "invalid bounding box [{x1}, {y1}, {x2}, {y2}]: need x1 < x2 and y1 < y2")
            }
            Error::InvalidParameter { name, value } => write!(f, "parameter `{name}` out of range: {value}"),
            Error::ImageMismatch { question_image, detection_image } => write!(
                f,
                "detections for image `{detection_image}` paired with a question about `{question_image}`"
            ),
            Error::NotEligible { question_id } => {
                write!(f, "question `{question_id}` is not eligible (needs relevant and irrelevant objects)")
            }
            Error::MissingPrediction { run_label, question_id } => {
                write!(f, "run `{run_label}` has no prediction for question `{question_id}`")
            }
            Error::EmptyEvaluation => f.write_str("no questions to evaluate"),
            Error::LengthMismatch { question_id, expected, found } => write!(
                f,
                "question `{question_id}`: expected {expected} per-object entries, found {found}"
            ),
            Error::MissingProbability { question_id, run_label } => write!(
                f,
                "question `{question_id}`: run `{run_label}` carries no probability for the reference class"
            ),
            Error::ConfigMismatch { expected, found, split } => write!(
                f,
                "split `{split}` has config fingerprint {found}, expected {expected}"
            ),
            Error::TooFewSplits { found } => write!(f, "split comparison needs at least 2 reports, got {found}"),
            Error::InfeasibleWorld(reason) => write!(f, "infeasible synthetic world: {reason}"),
            Error::UnknownQuestion { question_id } => write!(f, "unknown question `{question_id}`"),
        }
    }
}

impl core::error::Error for Error {}
