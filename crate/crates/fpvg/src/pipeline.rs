//! The pipeline stages behind each subcommand.
//!
//! Each stage reads its inputs, validates them fully, and writes its outputs
//! atomically into an output directory.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use fpvg_core::analysis::{compare_splits, seed_spread, C2iValue, DegradationRow, SeedSpread, SplitComparison};
use fpvg_core::importance::{loo_importance, ranking_match, ranking_match_by_fpvg, GroupMeans, RankingMatchScore};
use fpvg_core::manifest::{build_condition_manifests, build_loo_manifests};
use fpvg_core::metrics::{categorize, report_from_outcomes, ConditionRuns, FpvgReport, QuestionOutcome};
use fpvg_core::relevance::{assign_relevance, filter_eligible};
use fpvg_core::synthetic::{generate_world, run_model, SyntheticModelKind, SyntheticWorldConfig};
use fpvg_core::{
    Condition, DetectionSet, ImportanceVector, Manifest, PredictionRecord, QuestionRecord, RelevanceAssignment,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::MetricConfig;
use crate::error::{FpvgError, Result};
use crate::ingest::{
    open, parse_detections, parse_importance, parse_loo_predictions, parse_predictions, parse_questions,
    write_detections, write_importance, write_predictions, write_questions,
};
use crate::output::{ensure_dir, write_atomic, write_json};
use crate::report::{
    build_report, read_per_question, render_number, round_sig, write_per_question, write_report_csv,
    DropReportJson, ReportHeader, ReportJson, RunLabelsJson, PER_QUESTION_FILE,
};
use crate::wire::{parse_assignments, write_assignments, write_manifests};

pub const ASSIGNMENTS_FILE: &str = "assignments.jsonl";
pub const DROP_REPORT_FILE: &str = "drop_report.json";
pub const REPORT_FILE: &str = "report.json";
pub const REPORT_CSV_FILE: &str = "report.csv";
pub const RANKING_MATCH_FILE: &str = "ranking_match.jsonl";
pub const RANKING_SUMMARY_FILE: &str = "ranking_summary.json";
pub const LOO_IMPORTANCE_FILE: &str = "importance_loo.jsonl";
pub const COMPARISON_FILE: &str = "comparison.json";
pub const COMPARISON_CSV_FILE: &str = "comparison.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl OutputFormat {
    fn json(self) -> bool {
        self != OutputFormat::Csv
    }

    fn csv(self) -> bool {
        self != OutputFormat::Json
    }
}

// ---------------------------------------------------------------- prepare

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrepareSummary {
    pub drop_report: DropReportJson,
    pub config_fingerprint: String,
}

/// Assigns relevance for every annotated question that has detections.
pub fn prepare_assignments(
    questions: &[QuestionRecord],
    detections: &BTreeMap<String, DetectionSet>,
    config: &MetricConfig,
) -> Result<(Vec<RelevanceAssignment>, usize)> {
    let relevance = config.relevance()?;
    let mut missing = 0;
    let mut out = Vec::with_capacity(questions.len());
    for q in questions {
        match detections.get(&q.image_id) {
            Some(d) => out.push(assign_relevance(q, d, &relevance)?),
            None => missing += 1,
        }
    }
    Ok((out, missing))
}

pub fn prepare(questions: &Path, detections: &Path, out_dir: &Path, config: &MetricConfig) -> Result<PrepareSummary> {
    config.validate()?;
    let qs = parse_questions(questions)?;
    let ds = parse_detections(detections, config.max_objects)?;
    let (assignments, missing) = prepare_assignments(&qs.questions, &ds, config)?;
    let (_, drops) = filter_eligible(&assignments);
    let summary = PrepareSummary {
        drop_report: DropReportJson::new(&drops, qs.skipped_no_annotation, missing),
        config_fingerprint: config.fingerprint(),
    };
    ensure_dir(out_dir)?;
    write_atomic(&out_dir.join(ASSIGNMENTS_FILE), |w| write_assignments(w, &assignments))?;
    write_json(&out_dir.join(DROP_REPORT_FILE), &summary)?;
    Ok(summary)
}

// --------------------------------------------------------------- manifest

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifestMode {
    Conditions,
    Loo,
}

pub fn build_manifests(assignments: &BTreeMap<String, RelevanceAssignment>, mode: ManifestMode) -> Result<Vec<Manifest>> {
    let mut out = Vec::new();
    for a in assignments.values().filter(|a| a.eligible) {
        match mode {
            ManifestMode::Conditions => out.extend(build_condition_manifests(a)?.into_vec()),
            ManifestMode::Loo => out.extend(build_loo_manifests(a)),
        }
    }
    Ok(out)
}

pub fn manifest(assignments: &Path, mode: ManifestMode, out: &Path) -> Result<usize> {
    let manifests = build_manifests(&parse_assignments(assignments)?, mode)?;
    write_atomic(out, |w| write_manifests(w, &manifests))?;
    Ok(manifests.len())
}

// --------------------------------------------------------------- evaluate

/// Scores every eligible question. `jobs` sets the worker count; the result
/// does not depend on it.
pub fn evaluate_questions(
    questions: &[&QuestionRecord],
    runs: &ConditionRuns<'_>,
    config: &MetricConfig,
    jobs: usize,
) -> Result<FpvgReport> {
    let eq = config.answer_eq();
    let score = || -> Result<Vec<QuestionOutcome>> {
        questions
            .par_iter()
            .map(|q| Ok(categorize(&q.question_id, &q.gold_answer, runs, eq)?))
            .collect()
    };
    let outcomes = if jobs == 0 {
        score()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| FpvgError::invalid(format!("cannot start {jobs} worker threads: {e}")))?
            .install(score)?
    };
    let per_question = outcomes.into_iter().map(|o| (o.question_id.clone(), o)).collect();
    Ok(report_from_outcomes(per_question, config.fingerprint())?)
}

#[derive(Debug, Clone)]
pub struct EvaluateInputs {
    pub questions: PathBuf,
    pub assignments: PathBuf,
    pub pred_all: PathBuf,
    pub pred_rel: PathBuf,
    pub pred_irrel: PathBuf,
    pub padding_policy: String,
}

pub fn evaluate(
    inputs: &EvaluateInputs,
    out_dir: &Path,
    config: &MetricConfig,
    jobs: usize,
    format: OutputFormat,
) -> Result<ReportJson> {
    config.validate()?;
    let eq = config.answer_eq();
    let qs = parse_questions(&inputs.questions)?;
    let assignments = parse_assignments(&inputs.assignments)?;
    let mut missing_assignment = 0;
    let mut known = Vec::new();
    for q in &qs.questions {
        match assignments.get(&q.question_id) {
            Some(a) => known.push(a),
            None => missing_assignment += 1,
        }
    }
    let (eligible, drops) = filter_eligible(known);
    let selected: Vec<&QuestionRecord> = qs
        .questions
        .iter()
        .filter(|q| eligible.contains(&q.question_id))
        .collect();
    let all = parse_predictions(&inputs.pred_all, Condition::All, &label(&inputs.pred_all), eq)?;
    let rel = parse_predictions(&inputs.pred_rel, Condition::Rel, &label(&inputs.pred_rel), eq)?;
    let irrel = parse_predictions(&inputs.pred_irrel, Condition::Irrel, &label(&inputs.pred_irrel), eq)?;
    let runs = ConditionRuns {
        all: &all,
        rel: &rel,
        irrel: &irrel,
    };
    let report = evaluate_questions(&selected, &runs, config, jobs)?;
    let json = build_report(
        &report,
        config,
        DropReportJson::new(&drops, qs.skipped_no_annotation, missing_assignment),
        RunLabelsJson {
            all: all.run_label.clone(),
            rel: rel.run_label.clone(),
            irrel: irrel.run_label.clone(),
        },
        &inputs.padding_policy,
    )?;
    ensure_dir(out_dir)?;
    write_atomic(&out_dir.join(PER_QUESTION_FILE), |w| write_per_question(w, report.outcomes()))?;
    if format.json() {
        write_json(&out_dir.join(REPORT_FILE), &json)?;
    }
    if format.csv() {
        write_atomic(&out_dir.join(REPORT_CSV_FILE), |w| {
            write_report_csv(w, &json).map_err(std::io::Error::from)
        })?;
    }
    Ok(json)
}

fn label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads a saved `report.json` together with its per-question sidecar.
pub fn load_report(path: &Path) -> Result<FpvgReport> {
    let header: ReportHeader = serde_json::from_reader(open(path)?).map_err(|e| FpvgError::Validation {
        file: path.display().to_string(),
        line: e.line(),
        field: String::new(),
        message: e.to_string(),
    })?;
    let sidecar = path.parent().unwrap_or(Path::new(".")).join(&header.per_question_path);
    let per_question = read_per_question(open(&sidecar)?, &sidecar.display().to_string())?;
    Ok(report_from_outcomes(per_question, header.config_fingerprint)?)
}

// ------------------------------------------------------------- importance

#[derive(Debug, Clone)]
pub enum ImportanceSource {
    /// Precomputed vectors in `importance.jsonl` form.
    Vectors(PathBuf),
    /// Leave-one-out predictions plus the matching full-input run.
    Loo { pred_all: PathBuf, loo_predictions: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupMeansJson {
    pub n: usize,
    pub relevant_score: f64,
    pub irrelevant_score: f64,
}

impl From<GroupMeans> for GroupMeansJson {
    fn from(g: GroupMeans) -> Self {
        Self {
            n: g.n,
            relevant_score: round_sig(g.relevant),
            irrelevant_score: round_sig(g.irrelevant),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummaryJson {
    pub method: String,
    pub n_scored: usize,
    pub all: Option<GroupMeansJson>,
    pub fpvg_plus: Option<GroupMeansJson>,
    pub fpvg_minus: Option<GroupMeansJson>,
    /// Scored questions absent from the report.
    pub unmatched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingSummaryJson {
    pub config_fingerprint: String,
    pub tie_breaking: &'static str,
    /// Eligible questions without an importance vector.
    pub missing_vectors: usize,
    /// Vectors for questions that are not eligible.
    pub skipped_ineligible: usize,
    pub methods: Vec<MethodSummaryJson>,
}

#[derive(Serialize)]
struct RankingLine<'a> {
    question_id: &'a str,
    method: &'a str,
    relevant_score: f64,
    irrelevant_score: f64,
    relevant_hits: usize,
    relevant_count: usize,
    irrelevant_hits: usize,
    irrelevant_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    fpvg: Option<&'static str>,
}

/// Importance vectors from leave-one-out runs, one per eligible question.
pub fn loo_vectors(
    assignments: &BTreeMap<String, RelevanceAssignment>,
    base: &fpvg_core::PredictionRun,
    loo: &BTreeMap<usize, fpvg_core::PredictionRun>,
    config: &MetricConfig,
) -> Result<BTreeMap<String, ImportanceVector>> {
    let eq = config.answer_eq();
    let mut out = BTreeMap::new();
    for a in assignments.values().filter(|a| a.eligible) {
        let missing = |run_label: &str| {
            FpvgError::Core(fpvg_core::Error::MissingPrediction {
                run_label: run_label.to_owned(),
                question_id: a.question_id.clone(),
            })
        };
        let b = base.get(&a.question_id).ok_or_else(|| missing(&base.run_label))?;
        let records = (0..a.object_count())
            .map(|k| {
                loo.get(&k)
                    .and_then(|run| run.get(&a.question_id))
                    .ok_or_else(|| missing(&format!("loo({k})")))
            })
            .collect::<Result<Vec<&PredictionRecord>>>()?;
        out.insert(a.question_id.clone(), loo_importance(b, &records, eq, "loo")?);
    }
    Ok(out)
}

/// Ranking-match scores and their per-method summary.
pub fn rank_importance(
    assignments: &BTreeMap<String, RelevanceAssignment>,
    vectors: &BTreeMap<String, ImportanceVector>,
    report: &FpvgReport,
) -> Result<(Vec<RankingMatchScore>, RankingSummaryJson)> {
    let mut scores = Vec::new();
    let mut skipped_ineligible = 0;
    for v in vectors.values() {
        match assignments.get(&v.question_id) {
            Some(a) if a.eligible => scores.push(ranking_match(v, a)?),
            Some(_) => skipped_ineligible += 1,
            None => {
                return Err(FpvgError::Core(fpvg_core::Error::UnknownQuestion {
                    question_id: v.question_id.clone(),
                }))
            }
        }
    }
    let missing_vectors = assignments
        .values()
        .filter(|a| a.eligible && !vectors.contains_key(&a.question_id))
        .count();
    let mut by_method: BTreeMap<&str, Vec<RankingMatchScore>> = BTreeMap::new();
    for s in &scores {
        by_method.entry(s.method.as_str()).or_default().push(s.clone());
    }
    let methods = by_method
        .into_iter()
        .map(|(method, group)| {
            let summary = ranking_match_by_fpvg(&group, report);
            let n = group.len();
            let all = (n > 0).then(|| GroupMeans {
                n,
                relevant: group.iter().map(|s| s.relevant_score).sum::<f64>() / n as f64,
                irrelevant: group.iter().map(|s| s.irrelevant_score).sum::<f64>() / n as f64,
            });
            MethodSummaryJson {
                method: method.to_owned(),
                n_scored: n,
                all: all.map(Into::into),
                fpvg_plus: summary.fpvg_plus.map(Into::into),
                fpvg_minus: summary.fpvg_minus.map(Into::into),
                unmatched: summary.unmatched,
            }
        })
        .collect();
    let summary = RankingSummaryJson {
        config_fingerprint: report.config_fingerprint.clone(),
        tie_breaking: fpvg_core::importance::TIE_BREAKING,
        missing_vectors,
        skipped_ineligible,
        methods,
    };
    Ok((scores, summary))
}

pub fn importance(
    assignments: &Path,
    report: &Path,
    source: &ImportanceSource,
    out_dir: &Path,
    config: &MetricConfig,
) -> Result<RankingSummaryJson> {
    config.validate()?;
    let assignments = parse_assignments(assignments)?;
    let report = load_report(report)?;
    if report.config_fingerprint != config.fingerprint() {
        return Err(FpvgError::invalid(format!(
            "report was produced with config {} but the current config is {}",
            report.config_fingerprint,
            config.fingerprint()
        )));
    }
    ensure_dir(out_dir)?;
    let lengths: BTreeMap<String, usize> = assignments
        .iter()
        .map(|(k, a)| (k.clone(), a.object_count()))
        .collect();
    let vectors = match source {
        ImportanceSource::Vectors(path) => parse_importance(path, Some(&lengths))?,
        ImportanceSource::Loo {
            pred_all,
            loo_predictions,
        } => {
            let eq = config.answer_eq();
            let base = parse_predictions(pred_all, Condition::All, &label(pred_all), eq)?;
            let loo = parse_loo_predictions(loo_predictions, &label(loo_predictions), eq)?;
            let vectors = loo_vectors(&assignments, &base, &loo, config)?;
            write_atomic(&out_dir.join(LOO_IMPORTANCE_FILE), |w| write_importance(w, vectors.values()))?;
            vectors
        }
    };
    let (scores, summary) = rank_importance(&assignments, &vectors, &report)?;
    write_atomic(&out_dir.join(RANKING_MATCH_FILE), |w| {
        for s in &scores {
            let fpvg = report.per_question.get(&s.question_id).map(|o| {
                if o.category.grounded {
                    "FPVG_+"
                } else {
                    "FPVG_-"
                }
            });
            serde_json::to_writer(
                &mut *w,
                &RankingLine {
                    question_id: &s.question_id,
                    method: &s.method,
                    relevant_score: round_sig(s.relevant_score),
                    irrelevant_score: round_sig(s.irrelevant_score),
                    relevant_hits: s.relevant_hits,
                    relevant_count: s.relevant_count,
                    irrelevant_hits: s.irrelevant_hits,
                    irrelevant_count: s.irrelevant_count,
                    fpvg,
                },
            )?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    write_json(&out_dir.join(RANKING_SUMMARY_FILE), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- analyze

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadJson {
    pub n: usize,
    pub median: f64,
    pub max_abs_deviation: f64,
    pub min: f64,
    pub max: f64,
}

impl From<SeedSpread> for SpreadJson {
    fn from(s: SeedSpread) -> Self {
        Self {
            n: s.n,
            median: round_sig(s.median),
            max_abs_deviation: round_sig(s.max_abs_deviation),
            min: round_sig(s.min),
            max: round_sig(s.max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C2iJson {
    pub seed: usize,
    pub split: String,
    pub group: &'static str,
    pub correct: u64,
    pub incorrect: u64,
    /// A number, `"inf"` when there are no incorrect answers, or null for an empty group.
    pub c2i: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegradationJson {
    pub comparison: String,
    pub split: String,
    pub group: &'static str,
    /// One entry per seed; null when undefined.
    pub values: Vec<Option<f64>>,
    /// Why a value is undefined, per seed.
    pub gaps: Vec<Option<&'static str>>,
    /// Present when every seed has a value.
    pub spread: Option<SpreadJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonJson {
    pub config_fingerprint: String,
    pub baseline: String,
    pub splits: Vec<String>,
    pub seeds: usize,
    pub formula: &'static str,
    pub c2i: Vec<C2iJson>,
    pub degradation: Vec<DegradationJson>,
}

fn c2i_value(v: C2iValue) -> serde_json::Value {
    match v {
        C2iValue::Finite(x) => serde_json::json!(round_sig(x)),
        C2iValue::Infinite => serde_json::json!("inf"),
        C2iValue::Undefined => serde_json::Value::Null,
    }
}

/// Compares splits given as `(label, report)` pairs. A label may repeat once
/// per seed; the i-th report of each label forms seed i. The first label is
/// the baseline.
pub fn compare_labeled(reports: &[(String, FpvgReport)]) -> Result<ComparisonJson> {
    let mut splits: Vec<String> = Vec::new();
    let mut by_split: BTreeMap<&str, Vec<&FpvgReport>> = BTreeMap::new();
    for (label, r) in reports {
        if !by_split.contains_key(label.as_str()) {
            splits.push(label.clone());
        }
        by_split.entry(label.as_str()).or_default().push(r);
    }
    let seeds = by_split.values().map(Vec::len).max().unwrap_or(0);
    if let Some((split, runs)) = by_split.iter().find(|(_, v)| v.len() != seeds) {
        return Err(FpvgError::invalid(format!(
            "split `{split}` has {} reports but others have {seeds}; every split needs one report per seed",
            runs.len()
        )));
    }
    let comparisons = (0..seeds)
        .map(|i| {
            let labeled: Vec<(String, &FpvgReport)> = splits
                .iter()
                .map(|s| (s.clone(), by_split[s.as_str()][i]))
                .collect();
            compare_splits(&labeled).map_err(FpvgError::from)
        })
        .collect::<Result<Vec<SplitComparison>>>()?;
    let first = comparisons
        .first()
        .ok_or(FpvgError::Core(fpvg_core::Error::TooFewSplits { found: 0 }))?;
    let c2i = comparisons
        .iter()
        .enumerate()
        .flat_map(|(seed, c)| {
            c.cells.iter().map(move |cell| C2iJson {
                seed,
                split: cell.split.clone(),
                group: cell.subset.name(),
                correct: cell.c2i.correct,
                incorrect: cell.c2i.incorrect,
                c2i: c2i_value(cell.c2i.ratio),
            })
        })
        .collect();
    let rows = |pick: fn(&SplitComparison) -> &Vec<DegradationRow>| {
        (0..pick(first).len())
            .map(|j| {
                let per_seed: Vec<&DegradationRow> = comparisons.iter().map(|c| &pick(c)[j]).collect();
                let values: Vec<Option<f64>> = per_seed.iter().map(|r| r.value.ok().map(round_sig)).collect();
                let complete: Option<Vec<f64>> = per_seed.iter().map(|r| r.value.ok()).collect();
                DegradationJson {
                    comparison: per_seed[0].comparison.clone(),
                    split: per_seed[0].split.clone(),
                    group: per_seed[0].subset.name(),
                    values,
                    gaps: per_seed.iter().map(|r| r.value.err().map(|g| g.reason())).collect(),
                    spread: complete.as_deref().and_then(seed_spread).map(Into::into),
                }
            })
            .collect::<Vec<_>>()
    };
    let mut degradation = rows(|c| &c.across_splits);
    degradation.extend(rows(|c| &c.across_grounding));
    Ok(ComparisonJson {
        config_fingerprint: reports[0].1.config_fingerprint.clone(),
        baseline: first.baseline.clone(),
        splits,
        seeds,
        formula: fpvg_core::analysis::DEGRADATION_FORMULA,
        c2i,
        degradation,
    })
}

/// `seed,split,group,correct,incorrect,c2i,degradation`. Degradation is
/// relative to the baseline split; rows with group `FPVG_+->FPVG_-` hold
/// the degradation from grounded to ungrounded within a split.
pub fn write_comparison_csv<W: Write>(out: W, c: &ComparisonJson) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "split", "group", "correct", "incorrect", "c2i", "degradation"])?;
    let num = |v: Option<f64>| v.map(render_number).unwrap_or_default();
    let lookup = |comparison: &str, split: &str, group: &str, seed: usize| {
        c.degradation
            .iter()
            .find(|d| d.comparison == comparison && d.split == split && d.group == group)
            .and_then(|d| d.values[seed])
    };
    for cell in &c.c2i {
        let ratio = match &cell.c2i {
            serde_json::Value::Number(n) => num(n.as_f64()),
            serde_json::Value::String(s) => s.clone(),
            _ => String::new(),
        };
        let deg = if cell.split == c.baseline {
            String::new()
        } else {
            num(lookup(&format!("{} -> {}", c.baseline, cell.split), &cell.split, cell.group, cell.seed))
        };
        w.write_record([
            &cell.seed.to_string(),
            &cell.split,
            cell.group,
            &cell.correct.to_string(),
            &cell.incorrect.to_string(),
            &ratio,
            &deg,
        ])?;
    }
    for d in c.degradation.iter().filter(|d| d.comparison == "FPVG_+ -> FPVG_-") {
        for (seed, v) in d.values.iter().enumerate() {
            w.write_record([&seed.to_string(), &d.split, "FPVG_+->FPVG_-", "", "", "", &num(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn analyze(reports: &[(String, PathBuf)], out_dir: &Path, format: OutputFormat) -> Result<ComparisonJson> {
    let loaded = reports
        .iter()
        .map(|(label, path)| Ok((label.clone(), load_report(path)?)))
        .collect::<Result<Vec<_>>>()?;
    let comparison = compare_labeled(&loaded)?;
    ensure_dir(out_dir)?;
    if format.json() {
        write_json(&out_dir.join(COMPARISON_FILE), &comparison)?;
    }
    if format.csv() {
        write_atomic(&out_dir.join(COMPARISON_CSV_FILE), |w| {
            write_comparison_csv(w, &comparison).map_err(std::io::Error::from)
        })?;
    }
    Ok(comparison)
}

// ------------------------------------------------------------------ synth

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSummary {
    pub n_questions: usize,
    pub model: String,
    pub files: Vec<String>,
}

/// Writes a synthetic world and a simulated model's predictions in the
/// pipeline's input formats.
pub fn synth(
    world_config: &SyntheticWorldConfig,
    model: SyntheticModelKind,
    model_seed: u64,
    loo: bool,
    out_dir: &Path,
) -> Result<SynthSummary> {
    let world = generate_world(world_config)?;
    let manifests: Vec<Manifest> = world
        .assignments
        .iter()
        .map(|a| Ok(build_condition_manifests(a)?.into_vec()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let runs = run_model(model, &manifests, &world, model_seed)?;
    ensure_dir(out_dir)?;
    let mut files = Vec::new();
    let mut put = |name: &str, f: &dyn Fn(&mut dyn Write) -> std::io::Result<()>| -> Result<()> {
        write_atomic(&out_dir.join(name), |w| f(w))?;
        files.push(name.to_owned());
        Ok(())
    };
    put("questions.jsonl", &|w| write_questions(w, &world.questions))?;
    put("detections.jsonl", &|w| write_detections(w, &world.detections))?;
    put("manifests.jsonl", &|w| write_manifests(w, &manifests))?;
    for run in &runs {
        let name = format!("predictions_{}.jsonl", run.condition.name());
        put(&name, &|w| write_predictions(w, run))?;
    }
    if loo {
        let loo_manifests: Vec<Manifest> = world.assignments.iter().flat_map(build_loo_manifests).collect();
        let loo_runs = run_model(model, &loo_manifests, &world, model_seed)?;
        put("manifests_loo.jsonl", &|w| write_manifests(w, &loo_manifests))?;
        put("predictions_loo.jsonl", &|w| {
            loo_runs.iter().try_for_each(|run| write_predictions(w, run))
        })?;
    }
    Ok(SynthSummary {
        n_questions: world.questions.len(),
        model: model.to_string(),
        files,
    })
}

/// Parses a model name as accepted by `synth --model`.
pub fn parse_model(name: &str, alpha: Option<f64>) -> Result<SyntheticModelKind> {
    let kind = match (name, alpha) {
        ("grounded_oracle", None) => SyntheticModelKind::GroundedOracle,
        ("blind_prior", None) => SyntheticModelKind::BlindPrior,
        ("uniform_random", None) => SyntheticModelKind::UniformRandom,
        ("mixed", Some(a)) => SyntheticModelKind::Mixed(a),
        ("mixed", None) => return Err(FpvgError::invalid("model `mixed` needs --alpha")),
        (_, Some(_)) if ["grounded_oracle", "blind_prior", "uniform_random"].contains(&name) => {
            return Err(FpvgError::invalid("--alpha only applies to model `mixed`"))
        }
        _ => {
            return Err(FpvgError::invalid(format!(
                "unknown model `{name}`; expected grounded_oracle, blind_prior, uniform_random or mixed"
            )))
        }
    };
    kind.validate()?;
    Ok(kind)
}

/// Question ids that appear in `assignments` as eligible.
pub fn eligible_ids(assignments: &BTreeMap<String, RelevanceAssignment>) -> BTreeSet<String> {
    filter_eligible(assignments.values()).0
}
