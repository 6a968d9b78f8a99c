//! Relevant / irrelevant object partition and question eligibility.
//!
//! A detected object is *relevant* when its IoU with at least one annotated
//! box exceeds `iou_threshold`. It is *irrelevant* when it covers at most
//! `coverage_threshold` of every annotated box. Everything else is
//! *neither*: it stays in the full input but joins neither restricted input.
//! A question is eligible when it has at least one relevant and one
//! irrelevant object.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geometry::{coverage_fraction, iou};
use crate::record::{DetectionSet, QuestionRecord};
use crate::{Error, Result};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;
pub const DEFAULT_COVERAGE_THRESHOLD: f64 = 0.25;
pub const DEFAULT_MAX_OBJECTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelevanceConfig {
    pub iou_threshold: f64,
    pub coverage_threshold: f64,
    pub max_objects: usize,
}

impl Default for RelevanceConfig {
    fn default() -> Self {
        Self {
            iou_threshold: DEFAULT_IOU_THRESHOLD,
            coverage_threshold: DEFAULT_COVERAGE_THRESHOLD,
            max_objects: DEFAULT_MAX_OBJECTS,
        }
    }
}

impl RelevanceConfig {
    pub fn new(iou_threshold: f64, coverage_threshold: f64, max_objects: usize) -> Result<Self> {
        let cfg = Self {
            iou_threshold,
            coverage_threshold,
            max_objects,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.iou_threshold) {
            return Err(Error::InvalidParameter {
                name: "iou_threshold",
                value: self.iou_threshold,
            });
        }
        if !open_unit(self.coverage_threshold) {
            return Err(Error::InvalidParameter {
                name: "coverage_threshold",
                value: self.coverage_threshold,
            });
        }
        if self.max_objects == 0 {
            return Err(Error::InvalidParameter {
                name: "max_objects",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Per-question partition of object indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceAssignment {
    pub question_id: String,
    pub relevant: Vec<usize>,
    pub irrelevant: Vec<usize>,
    pub neither: Vec<usize>,
    pub eligible: bool,
}

impl RelevanceAssignment {
    /// Builds an assignment from explicit sets; indices are sorted and
    /// deduplicated and eligibility is derived.
    pub fn from_sets(
        question_id: impl Into<String>,
        relevant: impl IntoIterator<Item = usize>,
        irrelevant: impl IntoIterator<Item = usize>,
        neither: impl IntoIterator<Item = usize>,
    ) -> Self {
        let sorted = |it: &mut dyn Iterator<Item = usize>| it.collect::<BTreeSet<_>>().into_iter().collect::<Vec<_>>();
        let relevant = sorted(&mut relevant.into_iter());
        let irrelevant = sorted(&mut irrelevant.into_iter());
        let neither = sorted(&mut neither.into_iter());
        let eligible = !relevant.is_empty() && !irrelevant.is_empty();
        Self {
            question_id: question_id.into(),
            relevant,
            irrelevant,
            neither,
            eligible,
        }
    }

    /// Number of detected objects in the image.
    pub fn object_count(&self) -> usize {
        self.relevant.len() + self.irrelevant.len() + self.neither.len()
    }

    /// Checks disjointness, coverage of `0..object_count` and the eligibility flag.
    pub fn is_consistent(&self) -> bool {
        let mut seen = alloc::vec![false; self.object_count()];
        for &i in self.relevant.iter().chain(&self.irrelevant).chain(&self.neither) {
            match seen.get_mut(i) {
                Some(slot) if !*slot => *slot = true,
                _ => return false,
            }
        }
        let sorted = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        sorted(&self.relevant)
            && sorted(&self.irrelevant)
            && sorted(&self.neither)
            && self.eligible == (!self.relevant.is_empty() && !self.irrelevant.is_empty())
    }
}

/// Partitions the detections of `question`'s image.
///
/// An object passing the IoU test is relevant even if a configuration with
/// `iou_threshold < coverage_threshold` would also let it pass the
/// irrelevance test, so the two sets never overlap.
pub fn assign_relevance(
    question: &QuestionRecord,
    detections: &DetectionSet,
    cfg: &RelevanceConfig,
) -> Result<RelevanceAssignment> {
    if question.image_id != detections.image_id {
        return Err(Error::ImageMismatch {
            question_image: question.image_id.clone(),
            detection_image: detections.image_id.clone(),
        });
    }
    let mut relevant = Vec::new();
    let mut irrelevant = Vec::new();
    let mut neither = Vec::new();
    for (index, det) in detections.boxes.iter().enumerate() {
        let is_relevant = question
            .relevant_boxes
            .iter()
            .any(|ann| iou(det, ann) > cfg.iou_threshold);
        let is_irrelevant = !is_relevant
            && question
                .relevant_boxes
                .iter()
                .all(|ann| coverage_fraction(det, ann) <= cfg.coverage_threshold);
        if is_relevant {
            relevant.push(index);
        } else if is_irrelevant {
            irrelevant.push(index);
        } else {
            neither.push(index);
        }
    }
    let eligible = !relevant.is_empty() && !irrelevant.is_empty();
    Ok(RelevanceAssignment {
        question_id: question.question_id.clone(),
        relevant,
        irrelevant,
        neither,
        eligible,
    })
}

/// Why questions were dropped from evaluation.
///
/// Each ineligible question is counted once, under the first matching
/// reason in field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DropReport {
    pub total_questions: usize,
    pub no_detections: usize,
    pub no_relevant_detected: usize,
    pub no_irrelevant_detected: usize,
    pub total_eligible: usize,
}

impl DropReport {
    pub fn total_dropped(&self) -> usize {
        self.no_detections + self.no_relevant_detected + self.no_irrelevant_detected
    }
}

/// Splits assignments into the eligible question set and a drop summary.
pub fn filter_eligible<'a, I>(assignments: I) -> (BTreeSet<String>, DropReport)
where
    I: IntoIterator<Item = &'a RelevanceAssignment>,
{
    let mut eligible = BTreeSet::new();
    let mut report = DropReport::default();
    for a in assignments {
        report.total_questions += 1;
        if a.object_count() == 0 {
            report.no_detections += 1;
        } else if a.relevant.is_empty() {
            report.no_relevant_detected += 1;
        } else if a.irrelevant.is_empty() {
            report.no_irrelevant_detected += 1;
        } else {
            report.total_eligible += 1;
            eligible.insert(a.question_id.clone());
        }
    }
    (eligible, report)
}
