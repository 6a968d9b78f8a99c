//! Correct-to-incorrect (c2i) answer ratios and their degradation across
//! splits and grounding groups.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::metrics::FpvgReport;
use crate::{Error, Result};

/// Relative drop between two c2i ratios: `1 − after / before`.
pub const DEGRADATION_FORMULA: &str = "1 - c2i_after / c2i_before";

/// Question subset for c2i ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subset {
    FpvgPlus,
    FpvgMinus,
    All,
}

impl Subset {
    pub fn name(&self) -> &'static str {
        match self {
            Subset::FpvgPlus => "FPVG_+",
            Subset::FpvgMinus => "FPVG_-",
            Subset::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C2iValue {
    Finite(f64),
    /// Correct answers but no incorrect ones.
    Infinite,
    /// Empty subset.
    Undefined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct C2iRatio {
    pub subset_label: String,
    pub correct: u64,
    pub incorrect: u64,
    pub ratio: C2iValue,
}

impl C2iRatio {
    pub fn from_counts(subset_label: impl Into<String>, correct: u64, incorrect: u64) -> Self {
        let ratio = match (correct, incorrect) {
            (0, 0) => C2iValue::Undefined,
            (_, 0) => C2iValue::Infinite,
            (c, i) => C2iValue::Finite(c as f64 / i as f64),
        };
        Self {
            subset_label: subset_label.into(),
            correct,
            incorrect,
            ratio,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self.ratio {
            C2iValue::Finite(v) => Some(v),
            _ => None,
        }
    }
}

pub fn c2i(report: &FpvgReport, subset: Subset) -> C2iRatio {
    c2i_labeled(report, subset, subset.name())
}

pub fn c2i_labeled(report: &FpvgReport, subset: Subset, label: &str) -> C2iRatio {
    let (mut correct, mut incorrect) = (0, 0);
    for o in report.outcomes() {
        let member = match subset {
            Subset::FpvgPlus => o.category.grounded,
            Subset::FpvgMinus => !o.category.grounded,
            Subset::All => true,
        };
        if member {
            if o.category.correct {
                correct += 1;
            } else {
                incorrect += 1;
            }
        }
    }
    C2iRatio::from_counts(label, correct, incorrect)
}

/// Why a degradation could not be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegradationGap {
    BeforeNotFinite,
    AfterNotFinite,
    BeforeZero,
}

impl DegradationGap {
    pub fn reason(&self) -> &'static str {
        match self {
            DegradationGap::BeforeNotFinite => "reference ratio is infinite or undefined",
            DegradationGap::AfterNotFinite => "compared ratio is infinite or undefined",
            DegradationGap::BeforeZero => "reference ratio is zero",
        }
    }
}

/// Relative c2i drop from `before` to `after`; positive means `after` is worse.
pub fn degradation(before: &C2iRatio, after: &C2iRatio) -> core::result::Result<f64, DegradationGap> {
    let b = before.finite().ok_or(DegradationGap::BeforeNotFinite)?;
    let a = after.finite().ok_or(DegradationGap::AfterNotFinite)?;
    if b <= 0.0 {
        return Err(DegradationGap::BeforeZero);
    }
    Ok(1.0 - a / b)
}

/// One c2i cell of a split comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct C2iCell {
    pub split: String,
    pub subset: Subset,
    pub c2i: C2iRatio,
}

/// A degradation between two c2i cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradationRow {
    /// `"<baseline split> -> <split>"` or `"FPVG_+ -> FPVG_-"`.
    pub comparison: String,
    pub split: String,
    pub subset: Subset,
    pub value: core::result::Result<f64, DegradationGap>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitComparison {
    pub baseline: String,
    pub cells: Vec<C2iCell>,
    /// Baseline → other split, per grounding group.
    pub across_splits: Vec<DegradationRow>,
    /// `FPVG_+` → `FPVG_-`, per split.
    pub across_grounding: Vec<DegradationRow>,
}

impl SplitComparison {
    pub fn cell(&self, split: &str, subset: Subset) -> Option<&C2iCell> {
        self.cells.iter().find(|c| c.split == split && c.subset == subset)
    }
}

/// Compares labeled reports. The first split is the baseline (e.g. ID).
pub fn compare_splits(reports: &[(String, &FpvgReport)]) -> Result<SplitComparison> {
    if reports.len() < 2 {
        return Err(Error::TooFewSplits { found: reports.len() });
    }
    let (baseline, base_report) = &reports[0];
    for (split, r) in &reports[1..] {
        if r.config_fingerprint != base_report.config_fingerprint {
            return Err(Error::ConfigMismatch {
                expected: base_report.config_fingerprint.clone(),
                found: r.config_fingerprint.clone(),
                split: split.clone(),
            });
        }
    }
    let groups = [Subset::FpvgPlus, Subset::FpvgMinus, Subset::All];
    let mut cells = Vec::new();
    for (split, r) in reports {
        for subset in groups {
            cells.push(C2iCell {
                split: split.clone(),
                subset,
                c2i: c2i(r, subset),
            });
        }
    }
    let find = |split: &str, subset| {
        &cells
            .iter()
            .find(|c| c.split == split && c.subset == subset)
            .expect("cell computed above")
            .c2i
    };
    let mut across_splits = Vec::new();
    for (split, _) in &reports[1..] {
        for subset in groups {
            across_splits.push(DegradationRow {
                comparison: format!("{baseline} -> {split}"),
                split: split.clone(),
                subset,
                value: degradation(find(baseline, subset), find(split, subset)),
            });
        }
    }
    let across_grounding = reports
        .iter()
        .map(|(split, _)| DegradationRow {
            comparison: String::from("FPVG_+ -> FPVG_-"),
            split: split.clone(),
            subset: Subset::FpvgMinus,
            value: degradation(find(split, Subset::FpvgPlus), find(split, Subset::FpvgMinus)),
        })
        .collect();
    Ok(SplitComparison {
        baseline: baseline.clone(),
        cells,
        across_splits,
        across_grounding,
    })
}

/// Median and maximum absolute deviation from it over repeated runs (seeds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedSpread {
    pub n: usize,
    pub median: f64,
    pub max_abs_deviation: f64,
    pub min: f64,
    pub max: f64,
}

pub fn seed_spread(values: &[f64]) -> Option<SeedSpread> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let min = sorted[0];
    let max = sorted[n - 1];
    Some(SeedSpread {
        n,
        median,
        max_abs_deviation: (max - median).max(median - min),
        min,
        max,
    })
}
