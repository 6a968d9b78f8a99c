//! Metric configuration and its fingerprint.

use fpvg_core::analysis::DEGRADATION_FORMULA;
use fpvg_core::importance::TIE_BREAKING;
use fpvg_core::metrics::{BinEdges, SuffCompThresholds};
use fpvg_core::{AnswerEq, RelevanceConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{FpvgError, Result};

/// Every setting that can change a reported number.
///
/// File paths and split labels are deliberately absent, so reports over
/// different splits of the same configuration share a fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricConfig {
    pub iou_threshold: f64,
    pub coverage_threshold: f64,
    pub max_objects: usize,
    pub suff_good: f64,
    pub comp_bad: f64,
    pub flip_bin_edges: Vec<f64>,
    pub strict_answers: bool,
    pub tie_breaking: &'static str,
    pub degradation_formula: &'static str,
}

impl Default for MetricConfig {
    fn default() -> Self {
        let relevance = RelevanceConfig::default();
        let thresholds = SuffCompThresholds::default();
        Self {
            iou_threshold: relevance.iou_threshold,
            coverage_threshold: relevance.coverage_threshold,
            max_objects: relevance.max_objects,
            suff_good: thresholds.suff_good,
            comp_bad: thresholds.comp_bad,
            flip_bin_edges: BinEdges::default().edges().to_vec(),
            strict_answers: false,
            tie_breaking: TIE_BREAKING,
            degradation_formula: DEGRADATION_FORMULA,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        self.relevance()?;
        self.bin_edges()?;
        for (name, v) in [("suff_good", self.suff_good), ("comp_bad", self.comp_bad)] {
            if !v.is_finite() {
                return Err(FpvgError::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn relevance(&self) -> Result<RelevanceConfig> {
        Ok(RelevanceConfig::new(
            self.iou_threshold,
            self.coverage_threshold,
            self.max_objects,
        )?)
    }

    pub fn thresholds(&self) -> SuffCompThresholds {
        SuffCompThresholds {
            suff_good: self.suff_good,
            comp_bad: self.comp_bad,
        }
    }

    pub fn bin_edges(&self) -> Result<BinEdges> {
        Ok(BinEdges::new(self.flip_bin_edges.clone())?)
    }

    pub fn answer_eq(&self) -> AnswerEq {
        AnswerEq::from_strict_flag(self.strict_answers)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes)[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_tracks_semantic_fields() {
        let base = MetricConfig::default();
        assert_eq!(base.fingerprint().len(), 16);
        assert_eq!(base.fingerprint(), MetricConfig::default().fingerprint());
        let strict = MetricConfig {
            strict_answers: true,
            ..MetricConfig::default()
        };
        assert_ne!(base.fingerprint(), strict.fingerprint());
        let iou = MetricConfig {
            iou_threshold: 0.6,
            ..MetricConfig::default()
        };
        assert_ne!(base.fingerprint(), iou.fingerprint());
    }

    #[test]
    fn validation() {
        assert!(MetricConfig::default().validate().is_ok());
        let bad = MetricConfig {
            coverage_threshold: 1.2,
            ..MetricConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad_edges = MetricConfig {
            flip_bin_edges: vec![0.4, 0.2],
            ..MetricConfig::default()
        };
        assert!(bad_edges.validate().is_err());
    }
}
