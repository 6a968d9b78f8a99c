//! JSON Lines readers and writers for questions, detections, predictions and
//! importance vectors.
//!
//! Readers validate every line and report the file, 1-based line number and
//! field of the first violation. Blank lines are ignored. Results are keyed
//! or sorted by id, so line order never matters.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use fpvg_core::{
    AnswerEq, BoundingBox, Condition, DetectionSet, ImportanceVector, PredictionRecord, PredictionRun,
    QuestionRecord,
};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{FpvgError, Result};

/// Allowed deviation of a distribution's total from 1.
pub const DISTRIBUTION_SUM_TOLERANCE: f64 = 1e-4;

/// One parsed JSON object with its location, for field-level diagnostics.
pub(crate) struct Line<'a> {
    pub file: &'a str,
    pub line: usize,
    pub map: Map<String, Value>,
}

impl Line<'_> {
    pub fn err(&self, field: &str, message: impl Into<String>) -> FpvgError {
        FpvgError::validation(self.file, self.line, field, message)
    }

    fn get(&self, field: &str) -> Result<&Value> {
        self.map.get(field).ok_or_else(|| self.err(field, "missing required field"))
    }

    fn opt(&self, field: &str) -> Option<&Value> {
        self.map.get(field).filter(|v| !v.is_null())
    }

    pub fn string(&self, field: &str) -> Result<String> {
        match self.get(field)? {
            Value::String(s) => Ok(s.clone()),
            _ => Err(self.err(field, "expected a string")),
        }
    }

    pub fn number(&self, field: &str, v: &Value) -> Result<f64> {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.err(field, "expected a finite number"))
    }

    pub fn opt_number(&self, field: &str) -> Result<Option<f64>> {
        self.opt(field).map(|v| self.number(field, v)).transpose()
    }

    pub fn opt_index(&self, field: &str) -> Result<Option<usize>> {
        self.opt(field)
            .map(|v| {
                v.as_u64()
                    .map(|n| n as usize)
                    .ok_or_else(|| self.err(field, "expected a non-negative integer"))
            })
            .transpose()
    }

    pub fn array(&self, field: &str) -> Result<&Vec<Value>> {
        match self.get(field)? {
            Value::Array(a) => Ok(a),
            _ => Err(self.err(field, "expected an array")),
        }
    }

    pub fn index_list(&self, field: &str) -> Result<Vec<usize>> {
        self.array(field)?
            .iter()
            .map(|v| {
                v.as_u64()
                    .map(|n| n as usize)
                    .ok_or_else(|| self.err(field, "expected non-negative integers"))
            })
            .collect()
    }

    pub fn boolean(&self, field: &str) -> Result<bool> {
        self.get(field)?
            .as_bool()
            .ok_or_else(|| self.err(field, "expected a boolean"))
    }

    fn boxes(&self, field: &str) -> Result<Vec<BoundingBox>> {
        self.array(field)?
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let at = format!("{field}[{i}]");
                let c = v
                    .as_array()
                    .filter(|c| c.len() == 4)
                    .ok_or_else(|| self.err(&at, "expected [x1, y1, x2, y2]"))?;
                let c = c.iter().map(|x| self.number(&at, x)).collect::<Result<Vec<_>>>()?;
                BoundingBox::new(c[0], c[1], c[2], c[3]).map_err(|e| self.err(&at, e.to_string()))
            })
            .collect()
    }
}

/// Calls `f` for every non-blank line, parsed as a JSON object.
pub(crate) fn for_each_line<R, F>(reader: R, file: &str, mut f: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(Line<'_>) -> Result<()>,
{
    for (i, text) in reader.lines().enumerate() {
        let text = text.map_err(|e| FpvgError::io(file, e))?;
        if text.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let map = match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(map)) => map,
            Ok(_) => return Err(FpvgError::validation(file, line, "", "expected a JSON object")),
            Err(e) => return Err(FpvgError::validation(file, line, "", format!("invalid JSON: {e}"))),
        };
        f(Line { file, line, map })?;
    }
    Ok(())
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| FpvgError::io(path, e))
}

fn label(path: &Path) -> String {
    path.display().to_string()
}

/// Parsed questions plus the number skipped for lacking annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionSet {
    /// Sorted by question id.
    pub questions: Vec<QuestionRecord>,
    pub skipped_no_annotation: usize,
}

pub fn parse_questions(path: &Path) -> Result<QuestionSet> {
    read_questions(open(path)?, &label(path))
}

pub fn read_questions<R: BufRead>(reader: R, file: &str) -> Result<QuestionSet> {
    let mut by_id = BTreeMap::new();
    let mut skipped = 0;
    for_each_line(reader, file, |l| {
        let question_id = l.string("question_id")?;
        let image_id = l.string("image_id")?;
        let gold_answer = l.string("answer")?;
        let relevant_boxes = l.boxes("relevant_boxes")?;
        if by_id.contains_key(&question_id) {
            return Err(l.err("question_id", format!("duplicate question id `{question_id}`")));
        }
        if relevant_boxes.is_empty() {
            skipped += 1;
            return Ok(());
        }
        by_id.insert(
            question_id.clone(),
            QuestionRecord {
                question_id,
                image_id,
                gold_answer,
                relevant_boxes,
            },
        );
        Ok(())
    })?;
    Ok(QuestionSet {
        questions: by_id.into_values().collect(),
        skipped_no_annotation: skipped,
    })
}

pub fn parse_detections(path: &Path, max_objects: usize) -> Result<BTreeMap<String, DetectionSet>> {
    read_detections(open(path)?, &label(path), max_objects)
}

pub fn read_detections<R: BufRead>(reader: R, file: &str, max_objects: usize) -> Result<BTreeMap<String, DetectionSet>> {
    let mut out = BTreeMap::new();
    for_each_line(reader, file, |l| {
        let image_id = l.string("image_id")?;
        let boxes = l.boxes("boxes")?;
        if boxes.len() > max_objects {
            return Err(l.err(
                "boxes",
                format!("{} detections exceed the limit of {max_objects}", boxes.len()),
            ));
        }
        if out.contains_key(&image_id) {
            return Err(l.err("image_id", format!("duplicate image id `{image_id}`")));
        }
        out.insert(image_id.clone(), DetectionSet { image_id, boxes });
        Ok(())
    })?;
    Ok(out)
}

fn prediction_record(l: &Line<'_>, eq: AnswerEq) -> Result<PredictionRecord> {
    let question_id = l.string("question_id")?;
    let answer = l.string("answer")?;
    let prob = l.opt_number("prob")?;
    if let Some(p) = prob {
        if !(0.0..=1.0).contains(&p) {
            return Err(l.err("prob", format!("probability {p} outside [0, 1]")));
        }
    }
    let distribution = match l.opt("distribution") {
        None => None,
        Some(Value::Object(m)) => {
            let mut dist = BTreeMap::new();
            for (k, v) in m {
                let p = l.number("distribution", v)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(l.err("distribution", format!("probability {p} for `{k}` outside [0, 1]")));
                }
                dist.insert(k.clone(), p);
            }
            Some(dist)
        }
        Some(_) => return Err(l.err("distribution", "expected an object of answer -> probability")),
    };
    let mut record = PredictionRecord::new(question_id, answer);
    record.predicted_class_prob = prob;
    if let Some(dist) = distribution {
        let total: f64 = dist.values().sum();
        if (total - 1.0).abs() > DISTRIBUTION_SUM_TOLERANCE {
            return Err(l.err("distribution", format!("probabilities sum to {total}, expected 1")));
        }
        let max = dist.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let own = dist
            .iter()
            .find(|(k, _)| eq.eq(k, &record.answer))
            .map(|(_, p)| *p)
            .ok_or_else(|| l.err("answer", "answer missing from distribution"))?;
        if own < max {
            return Err(l.err("answer", "answer is not the argmax of the distribution"));
        }
        match prob {
            Some(p) if (p - own).abs() > 1e-9 => {
                return Err(l.err("prob", format!("prob {p} differs from distribution value {own}")));
            }
            _ => record.predicted_class_prob = Some(own),
        }
        record.distribution = Some(dist);
    }
    Ok(record)
}

pub fn parse_predictions(path: &Path, condition: Condition, run_label: &str, eq: AnswerEq) -> Result<PredictionRun> {
    read_predictions(open(path)?, &label(path), condition, run_label, eq)
}

pub fn read_predictions<R: BufRead>(
    reader: R,
    file: &str,
    condition: Condition,
    run_label: &str,
    eq: AnswerEq,
) -> Result<PredictionRun> {
    let mut run = PredictionRun::new(condition, run_label);
    for_each_line(reader, file, |l| {
        if l.opt("loo_index").is_some() {
            return Err(l.err("loo_index", "leave-one-out record in a single-condition run"));
        }
        let record = prediction_record(&l, eq)?;
        if run.get(&record.question_id).is_some() {
            return Err(l.err("question_id", format!("duplicate question id `{}`", record.question_id)));
        }
        run.insert(record);
        Ok(())
    })?;
    Ok(run)
}

/// Leave-one-out predictions: one file, each line tagged with `loo_index`.
/// Returns one run per omitted index.
pub fn parse_loo_predictions(path: &Path, run_label: &str, eq: AnswerEq) -> Result<BTreeMap<usize, PredictionRun>> {
    read_loo_predictions(open(path)?, &label(path), run_label, eq)
}

pub fn read_loo_predictions<R: BufRead>(
    reader: R,
    file: &str,
    run_label: &str,
    eq: AnswerEq,
) -> Result<BTreeMap<usize, PredictionRun>> {
    let mut runs: BTreeMap<usize, PredictionRun> = BTreeMap::new();
    for_each_line(reader, file, |l| {
        let k = l.opt_index("loo_index")?.ok_or_else(|| l.err("loo_index", "missing required field"))?;
        let record = prediction_record(&l, eq)?;
        let run = runs
            .entry(k)
            .or_insert_with(|| PredictionRun::new(Condition::Loo(k), format!("{run_label}/loo({k})")));
        if run.get(&record.question_id).is_some() {
            return Err(l.err("question_id", format!("duplicate record for `{}` at loo_index {k}", record.question_id)));
        }
        run.insert(record);
        Ok(())
    })?;
    Ok(runs)
}

/// Importance vectors keyed by question id. With `expected_lengths`, every
/// vector must belong to a known question and match its object count.
pub fn parse_importance(
    path: &Path,
    expected_lengths: Option<&BTreeMap<String, usize>>,
) -> Result<BTreeMap<String, ImportanceVector>> {
    read_importance(open(path)?, &label(path), expected_lengths)
}

pub fn read_importance<R: BufRead>(
    reader: R,
    file: &str,
    expected_lengths: Option<&BTreeMap<String, usize>>,
) -> Result<BTreeMap<String, ImportanceVector>> {
    let mut out = BTreeMap::new();
    for_each_line(reader, file, |l| {
        let question_id = l.string("question_id")?;
        let method = l.string("method")?;
        let scores = l
            .array("scores")?
            .iter()
            .map(|v| l.number("scores", v))
            .collect::<Result<Vec<_>>>()?;
        if let Some(lengths) = expected_lengths {
            let expected = *lengths
                .get(&question_id)
                .ok_or_else(|| l.err("question_id", format!("unknown question `{question_id}`")))?;
            if scores.len() != expected {
                return Err(l.err(
                    "scores",
                    format!("{} scores for an image with {expected} objects", scores.len()),
                ));
            }
        }
        if out.contains_key(&question_id) {
            return Err(l.err("question_id", format!("duplicate question id `{question_id}`")));
        }
        out.insert(
            question_id.clone(),
            ImportanceVector {
                question_id,
                method,
                scores,
            },
        );
        Ok(())
    })?;
    Ok(out)
}

fn write_line<W: Write + ?Sized, T: Serialize>(w: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")
}

#[derive(Serialize)]
struct QuestionLine<'a> {
    question_id: &'a str,
    image_id: &'a str,
    answer: &'a str,
    relevant_boxes: Vec<[f64; 4]>,
}

pub fn write_questions<'a, W, I>(w: &mut W, questions: I) -> io::Result<()>
where
    W: Write + ?Sized,
    I: IntoIterator<Item = &'a QuestionRecord>,
{
    for q in questions {
        write_line(
            w,
            &QuestionLine {
                question_id: &q.question_id,
                image_id: &q.image_id,
                answer: &q.gold_answer,
                relevant_boxes: q.relevant_boxes.iter().map(BoundingBox::corners).collect(),
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DetectionLine<'a> {
    image_id: &'a str,
    boxes: Vec<[f64; 4]>,
}

pub fn write_detections<'a, W, I>(w: &mut W, detections: I) -> io::Result<()>
where
    W: Write + ?Sized,
    I: IntoIterator<Item = &'a DetectionSet>,
{
    for d in detections {
        write_line(
            w,
            &DetectionLine {
                image_id: &d.image_id,
                boxes: d.boxes.iter().map(BoundingBox::corners).collect(),
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PredictionLine<'a> {
    question_id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    loo_index: Option<usize>,
    answer: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distribution: Option<&'a BTreeMap<String, f64>>,
}

/// Writes a run's records in question-id order. LOO runs tag every line
/// with `loo_index`.
pub fn write_predictions<W: Write + ?Sized>(w: &mut W, run: &PredictionRun) -> io::Result<()> {
    for r in run.records.values() {
        write_line(
            w,
            &PredictionLine {
                question_id: &r.question_id,
                loo_index: run.condition.loo_index(),
                answer: &r.answer,
                prob: r.predicted_class_prob,
                distribution: r.distribution.as_ref(),
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ImportanceLine<'a> {
    question_id: &'a str,
    method: &'a str,
    scores: &'a [f64],
}

pub fn write_importance<'a, W, I>(w: &mut W, vectors: I) -> io::Result<()>
where
    W: Write + ?Sized,
    I: IntoIterator<Item = &'a ImportanceVector>,
{
    for v in vectors {
        write_line(
            w,
            &ImportanceLine {
                question_id: &v.question_id,
                method: &v.method,
                scores: &v.scores,
            },
        )?;
    }
    Ok(())
}
