//! Input data model shared by every module.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::answer::AnswerEq;
use crate::geometry::BoundingBox;
use crate::manifest::Condition;

/// A question with its gold answer and annotated relevant regions.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionRecord {
    pub question_id: String,
    pub image_id: String,
    pub gold_answer: String,
    pub relevant_boxes: Vec<BoundingBox>,
}

/// Detected objects of one image. Box index = object index in the model's
/// visual input.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSet {
    pub image_id: String,
    pub boxes: Vec<BoundingBox>,
}

/// One model prediction for one question under one test condition.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub question_id: String,
    pub answer: String,
    pub predicted_class_prob: Option<f64>,
    pub distribution: Option<BTreeMap<String, f64>>,
}

impl PredictionRecord {
    pub fn new(question_id: impl Into<String>, answer: impl Into<String>) -> Self {
        Self {
            question_id: question_id.into(),
            answer: answer.into(),
            predicted_class_prob: None,
            distribution: None,
        }
    }

    pub fn with_prob(mut self, prob: f64) -> Self {
        self.predicted_class_prob = Some(prob);
        self
    }

    pub fn with_distribution(mut self, distribution: BTreeMap<String, f64>) -> Self {
        self.predicted_class_prob = distribution.get(&self.answer).copied();
        self.distribution = Some(distribution);
        self
    }

    /// Probability this record assigns to `class`.
    ///
    /// With a full distribution, classes outside its support have probability
    /// zero. With only a top-1 probability, the lookup succeeds only when
    /// `class` is the predicted answer.
    pub fn probability_of(&self, class: &str, eq: AnswerEq) -> Option<f64> {
        if let Some(dist) = &self.distribution {
            if let Some(p) = dist.get(class) {
                return Some(*p);
            }
            return Some(
                dist.iter()
                    .find(|(k, _)| eq.eq(k, class))
                    .map_or(0.0, |(_, p)| *p),
            );
        }
        match self.predicted_class_prob {
            Some(p) if eq.eq(&self.answer, class) => Some(p),
            _ => None,
        }
    }
}

/// All predictions of one model under one test condition.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRun {
    pub condition: Condition,
    pub run_label: String,
    pub records: BTreeMap<String, PredictionRecord>,
}

impl PredictionRun {
    pub fn new(condition: Condition, run_label: impl Into<String>) -> Self {
        Self {
            condition,
            run_label: run_label.into(),
            records: BTreeMap::new(),
        }
    }

    /// Inserts a record, replacing any earlier record for the same question.
    pub fn insert(&mut self, record: PredictionRecord) -> Option<PredictionRecord> {
        self.records.insert(record.question_id.clone(), record)
    }

    pub fn get(&self, question_id: &str) -> Option<&PredictionRecord> {
        self.records.get(question_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Per-object importance scores for one question, indexed like the
/// question's full detection set.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceVector {
    pub question_id: String,
    pub method: String,
    pub scores: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_lookup() {
        let mut dist = BTreeMap::new();
        dist.insert("red".into(), 0.7);
        dist.insert("blue".into(), 0.3);
        let r = PredictionRecord::new("q1", "red").with_distribution(dist);
        assert_eq!(r.predicted_class_prob, Some(0.7));
        assert_eq!(r.probability_of("blue", AnswerEq::Normalized), Some(0.3));
        assert_eq!(r.probability_of("Blue", AnswerEq::Normalized), Some(0.3));
        assert_eq!(r.probability_of("Blue", AnswerEq::Strict), Some(0.0));
        assert_eq!(r.probability_of("green", AnswerEq::Normalized), Some(0.0));

        let top1 = PredictionRecord::new("q1", "red").with_prob(0.9);
        assert_eq!(top1.probability_of("red", AnswerEq::Normalized), Some(0.9));
        assert_eq!(top1.probability_of("blue", AnswerEq::Normalized), None);
        assert_eq!(PredictionRecord::new("q1", "red").probability_of("red", AnswerEq::Normalized), None);
    }
}
