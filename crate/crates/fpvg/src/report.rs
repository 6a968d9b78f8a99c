//! `report.json`, the per-question sidecar and the CSV rendering.
//!
//! Every fraction is written as `{"value", "numerator", "denominator"}`.
//! Decimal values are rounded to 12 significant digits, identically in JSON
//! and CSV.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use fpvg_core::metrics::{
    flip_rate_by_category, suff_comp_summary, FlipCategorizer, FlipRateRow, FpvgCategory, FpvgReport,
    GroundingBreakdown, QuadrantCounts, QuestionOutcome,
};
use fpvg_core::relevance::DropReport;
use fpvg_core::Ratio;
use serde::{Deserialize, Serialize};

use crate::config::MetricConfig;
use crate::error::Result;
use crate::ingest::for_each_line;

pub const PER_QUESTION_FILE: &str = "per_question.jsonl";

/// Rounds to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

/// Text form shared by JSON and CSV.
pub fn render_number(v: f64) -> String {
    serde_json::to_string(&round_sig(v)).expect("finite float")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioJson {
    pub value: Option<f64>,
    pub numerator: u64,
    pub denominator: u64,
}

impl From<Ratio> for RatioJson {
    fn from(r: Ratio) -> Self {
        Self {
            value: r.value().map(round_sig),
            numerator: r.numerator,
            denominator: r.denominator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownJson {
    pub plus: RatioJson,
    pub minus: RatioJson,
    pub plus_correct: RatioJson,
    pub plus_incorrect: RatioJson,
    pub minus_correct: RatioJson,
    pub minus_incorrect: RatioJson,
}

impl From<&GroundingBreakdown> for BreakdownJson {
    fn from(b: &GroundingBreakdown) -> Self {
        Self {
            plus: b.plus.into(),
            minus: b.minus.into(),
            plus_correct: b.plus_correct.into(),
            plus_incorrect: b.plus_incorrect.into(),
            minus_correct: b.minus_correct.into(),
            minus_incorrect: b.minus_incorrect.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyJson {
    pub all: RatioJson,
    pub rel: RatioJson,
    pub irrel: RatioJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropReportJson {
    pub total_questions: usize,
    pub skipped_no_annotation: usize,
    /// Questions with no relevance assignment, i.e. no detections for their image.
    pub skipped_missing_detections: usize,
    pub no_detections: usize,
    pub no_relevant_detected: usize,
    pub no_irrelevant_detected: usize,
    pub total_eligible: usize,
}

impl DropReportJson {
    pub fn new(report: &DropReport, skipped_no_annotation: usize, skipped_missing_detections: usize) -> Self {
        Self {
            total_questions: report.total_questions + skipped_no_annotation + skipped_missing_detections,
            skipped_no_annotation,
            skipped_missing_detections,
            no_detections: report.no_detections,
            no_relevant_detected: report.no_relevant_detected,
            no_irrelevant_detected: report.no_irrelevant_detected,
            total_eligible: report.total_eligible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantsJson {
    pub good_suff_good_comp: RatioJson,
    pub good_suff_bad_comp: RatioJson,
    pub bad_suff_good_comp: RatioJson,
    pub bad_suff_bad_comp: RatioJson,
}

impl From<&QuadrantCounts> for QuadrantsJson {
    fn from(q: &QuadrantCounts) -> Self {
        let n = q.total();
        let r = |c| Ratio::new(c, n).into();
        Self {
            good_suff_good_comp: r(q.good_suff_good_comp),
            good_suff_bad_comp: r(q.good_suff_bad_comp),
            bad_suff_good_comp: r(q.bad_suff_good_comp),
            bad_suff_bad_comp: r(q.bad_suff_bad_comp),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipRowJson {
    pub category: String,
    pub pairing: String,
    pub flip_rate: RatioJson,
}

impl From<&FlipRateRow> for FlipRowJson {
    fn from(r: &FlipRateRow) -> Self {
        Self {
            category: r.category.clone(),
            pairing: r.pairing.name().to_owned(),
            flip_rate: r.rate().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipRatesJson {
    pub suff_bins: Vec<FlipRowJson>,
    pub comp_bins: Vec<FlipRowJson>,
    pub fpvg_terms: Vec<FlipRowJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdsJson {
    pub suff_good: f64,
    pub comp_bad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuffCompJson {
    pub thresholds: ThresholdsJson,
    pub n_scored: u64,
    pub n_excluded: u64,
    pub mean_suff: Option<f64>,
    pub mean_comp: Option<f64>,
    pub quadrants: QuadrantsJson,
    pub flip_rates: FlipRatesJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLabelsJson {
    pub all: String,
    pub rel: String,
    pub irrel: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportJson {
    pub config_fingerprint: String,
    pub n_evaluated: u64,
    pub drop_report: DropReportJson,
    pub accuracy: AccuracyJson,
    pub fpvg: BreakdownJson,
    pub mod_fpvg: BreakdownJson,
    pub suff_comp: SuffCompJson,
    pub per_question_path: String,
    pub run_labels: RunLabelsJson,
    /// Input policy declared by the model runner (e.g. `zero_pad`, `compact`).
    pub padding_policy: String,
    pub config: MetricConfig,
}

/// The fields other commands need from a saved report.
#[derive(Debug, Clone, Deserialize)]
pub struct ReportHeader {
    pub config_fingerprint: String,
    pub per_question_path: String,
}

pub fn build_report(
    report: &FpvgReport,
    config: &MetricConfig,
    drop_report: DropReportJson,
    run_labels: RunLabelsJson,
    padding_policy: &str,
) -> Result<ReportJson> {
    let agg = &report.aggregates;
    let thresholds = config.thresholds();
    let edges = config.bin_edges()?;
    let summary = suff_comp_summary(report.outcomes(), &thresholds);
    let rows = |c| {
        flip_rate_by_category(report.outcomes(), c, &edges)
            .iter()
            .map(FlipRowJson::from)
            .collect()
    };
    Ok(ReportJson {
        config_fingerprint: report.config_fingerprint.clone(),
        n_evaluated: agg.n_evaluated,
        drop_report,
        accuracy: AccuracyJson {
            all: agg.accuracy.all.into(),
            rel: agg.accuracy.rel.into(),
            irrel: agg.accuracy.irrel.into(),
        },
        fpvg: (&agg.fpvg).into(),
        mod_fpvg: (&agg.mod_fpvg).into(),
        suff_comp: SuffCompJson {
            thresholds: ThresholdsJson {
                suff_good: thresholds.suff_good,
                comp_bad: thresholds.comp_bad,
            },
            n_scored: summary.n_scored,
            n_excluded: summary.n_excluded,
            mean_suff: summary.mean_suff.map(round_sig),
            mean_comp: summary.mean_comp.map(round_sig),
            quadrants: (&summary.quadrants).into(),
            flip_rates: FlipRatesJson {
                suff_bins: rows(FlipCategorizer::SuffBins),
                comp_bins: rows(FlipCategorizer::CompBins),
                fpvg_terms: rows(FlipCategorizer::FpvgTerms),
            },
        },
        per_question_path: PER_QUESTION_FILE.to_owned(),
        run_labels,
        padding_policy: padding_policy.to_owned(),
        config: config.clone(),
    })
}

fn csv_ratio<W: Write>(w: &mut csv::Writer<W>, section: &str, metric: &str, r: &RatioJson) -> csv::Result<()> {
    let value = r.value.map(render_number).unwrap_or_default();
    w.write_record([
        section,
        metric,
        &value,
        &r.numerator.to_string(),
        &r.denominator.to_string(),
    ])
}

/// Flat CSV view of the report: `section,metric,value,numerator,denominator`.
pub fn write_report_csv<W: Write>(out: W, r: &ReportJson) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["section", "metric", "value", "numerator", "denominator"])?;
    for (name, v) in [("all", &r.accuracy.all), ("rel", &r.accuracy.rel), ("irrel", &r.accuracy.irrel)] {
        csv_ratio(&mut w, "accuracy", name, v)?;
    }
    for (section, b) in [("fpvg", &r.fpvg), ("mod_fpvg", &r.mod_fpvg)] {
        for (name, v) in [
            ("plus", &b.plus),
            ("minus", &b.minus),
            ("plus_correct", &b.plus_correct),
            ("plus_incorrect", &b.plus_incorrect),
            ("minus_correct", &b.minus_correct),
            ("minus_incorrect", &b.minus_incorrect),
        ] {
            csv_ratio(&mut w, section, name, v)?;
        }
    }
    let q = &r.suff_comp.quadrants;
    for (name, v) in [
        ("good_suff_good_comp", &q.good_suff_good_comp),
        ("good_suff_bad_comp", &q.good_suff_bad_comp),
        ("bad_suff_good_comp", &q.bad_suff_good_comp),
        ("bad_suff_bad_comp", &q.bad_suff_bad_comp),
    ] {
        csv_ratio(&mut w, "suff_comp_quadrants", name, v)?;
    }
    let flips = &r.suff_comp.flip_rates;
    for (section, rows) in [
        ("flip_rate_suff_bins", &flips.suff_bins),
        ("flip_rate_comp_bins", &flips.comp_bins),
        ("flip_rate_fpvg_terms", &flips.fpvg_terms),
    ] {
        for row in rows {
            csv_ratio(&mut w, section, &format!("{}|{}", row.category, row.pairing), &row.flip_rate)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PerQuestionLine {
    question_id: String,
    category: String,
    grounded: bool,
    correct: bool,
    mod_grounded: bool,
    gold_answer: String,
    answer_all: String,
    answer_rel: String,
    answer_irrel: String,
    rel_retained: bool,
    irrel_retained: bool,
    correct_rel: bool,
    correct_irrel: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    suff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comp: Option<f64>,
}

pub fn write_per_question<'a, W, I>(w: &mut W, outcomes: I) -> io::Result<()>
where
    W: Write + ?Sized,
    I: IntoIterator<Item = &'a QuestionOutcome>,
{
    for o in outcomes {
        let line = PerQuestionLine {
            question_id: o.question_id.clone(),
            category: o.category.label().to_owned(),
            grounded: o.category.grounded,
            correct: o.category.correct,
            mod_grounded: o.mod_grounded(),
            gold_answer: o.gold_answer.clone(),
            answer_all: o.answer_all.clone(),
            answer_rel: o.answer_rel.clone(),
            answer_irrel: o.answer_irrel.clone(),
            rel_retained: o.rel_retained,
            irrel_retained: o.irrel_retained,
            correct_rel: o.correct_rel,
            correct_irrel: o.correct_irrel,
            suff: o.suff,
            comp: o.comp,
        };
        serde_json::to_writer(&mut *w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a per-question sidecar back into outcomes.
pub fn read_per_question<R: BufRead>(reader: R, file: &str) -> Result<BTreeMap<String, QuestionOutcome>> {
    let mut out = BTreeMap::new();
    for_each_line(reader, file, |l| {
        let line: PerQuestionLine = serde_json::from_value(serde_json::Value::Object(l.map.clone()))
            .map_err(|e| l.err("", e.to_string()))?;
        let category = FpvgCategory {
            grounded: line.rel_retained && !line.irrel_retained,
            correct: line.correct,
        };
        if category.grounded != line.grounded || category.label() != line.category {
            return Err(l.err("category", "category disagrees with retained-answer flags"));
        }
        out.insert(
            line.question_id.clone(),
            QuestionOutcome {
                question_id: line.question_id,
                gold_answer: line.gold_answer,
                answer_all: line.answer_all,
                answer_rel: line.answer_rel,
                answer_irrel: line.answer_irrel,
                category,
                rel_retained: line.rel_retained,
                irrel_retained: line.irrel_retained,
                correct_rel: line.correct_rel,
                correct_irrel: line.correct_irrel,
                suff: line.suff,
                comp: line.comp,
            },
        );
        Ok(())
    })?;
    Ok(out)
}
