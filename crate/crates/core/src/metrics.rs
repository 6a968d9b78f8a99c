//! FPVG categorization and aggregation, sufficiency / comprehensiveness and
//! answer-flip analyses.
//!
//! A question is grounded (`FPVG_+`) when the answer under the full input
//! is kept with relevant objects only and changes with irrelevant objects
//! only. Each evaluated question additionally carries the correctness of the
//! full-input answer, giving four sub-categories.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::answer::AnswerEq;
use crate::ratio::Ratio;
use crate::record::{PredictionRecord, PredictionRun, QuestionRecord};
use crate::{Error, Result};

/// Per-question FPVG: `Eq(all, rel) ∧ ¬Eq(all, irrel)`.
pub fn fpvg_question(eq: AnswerEq, all: &str, rel: &str, irrel: &str) -> bool {
    eq.eq(all, rel) && !eq.eq(all, irrel)
}

/// Ablated FPVG without the irrelevant-objects test: `Eq(all, rel)`.
pub fn mod_fpvg_question(eq: AnswerEq, all: &str, rel: &str) -> bool {
    eq.eq(all, rel)
}

/// Grounding status and full-input correctness of one question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FpvgCategory {
    pub grounded: bool,
    pub correct: bool,
}

impl FpvgCategory {
    pub const ALL: [FpvgCategory; 4] = [
        FpvgCategory { grounded: true, correct: true },
        FpvgCategory { grounded: true, correct: false },
        FpvgCategory { grounded: false, correct: true },
        FpvgCategory { grounded: false, correct: false },
    ];

    pub fn label(&self) -> &'static str {
        match (self.grounded, self.correct) {
            (true, true) => "plus_correct",
            (true, false) => "plus_incorrect",
            (false, true) => "minus_correct",
            (false, false) => "minus_incorrect",
        }
    }
}

/// The three runs needed for FPVG.
#[derive(Debug, Clone, Copy)]
pub struct ConditionRuns<'a> {
    pub all: &'a PredictionRun,
    pub rel: &'a PredictionRun,
    pub irrel: &'a PredictionRun,
}

impl<'a> ConditionRuns<'a> {
    fn lookup(&self, question_id: &str) -> Result<[&'a PredictionRecord; 3]> {
        let get = |run: &'a PredictionRun| {
            run.get(question_id).ok_or_else(|| Error::MissingPrediction {
                run_label: run.run_label.clone(),
                question_id: question_id.into(),
            })
        };
        Ok([get(self.all)?, get(self.rel)?, get(self.irrel)?])
    }
}

/// Everything computed for one evaluated question.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionOutcome {
    pub question_id: String,
    pub gold_answer: String,
    pub answer_all: String,
    pub answer_rel: String,
    pub answer_irrel: String,
    pub category: FpvgCategory,
    /// `Eq(all, rel)`; also the ablated metric's grounding status.
    pub rel_retained: bool,
    /// `Eq(all, irrel)`.
    pub irrel_retained: bool,
    pub correct_rel: bool,
    pub correct_irrel: bool,
    pub suff: Option<f64>,
    pub comp: Option<f64>,
}

impl QuestionOutcome {
    pub fn mod_grounded(&self) -> bool {
        self.rel_retained
    }

    pub fn mod_category(&self) -> FpvgCategory {
        FpvgCategory {
            grounded: self.rel_retained,
            correct: self.category.correct,
        }
    }
}

/// Categorizes one question from its gold answer and the three runs.
pub fn categorize(
    question_id: &str,
    gold_answer: &str,
    runs: &ConditionRuns<'_>,
    eq: AnswerEq,
) -> Result<QuestionOutcome> {
    let [all, rel, irrel] = runs.lookup(question_id)?;
    let rel_retained = eq.eq(&all.answer, &rel.answer);
    let irrel_retained = eq.eq(&all.answer, &irrel.answer);
    let p_all = all.probability_of(&all.answer, eq);
    let drop_to = |other: &PredictionRecord| match (p_all, other.probability_of(&all.answer, eq)) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    Ok(QuestionOutcome {
        question_id: question_id.into(),
        gold_answer: gold_answer.into(),
        answer_all: all.answer.clone(),
        answer_rel: rel.answer.clone(),
        answer_irrel: irrel.answer.clone(),
        category: FpvgCategory {
            grounded: rel_retained && !irrel_retained,
            correct: eq.eq(&all.answer, gold_answer),
        },
        rel_retained,
        irrel_retained,
        correct_rel: eq.eq(&rel.answer, gold_answer),
        correct_irrel: eq.eq(&irrel.answer, gold_answer),
        suff: drop_to(rel),
        comp: drop_to(irrel),
    })
}

/// Grounded / ungrounded fractions with their correctness split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundingBreakdown {
    pub plus: Ratio,
    pub minus: Ratio,
    pub plus_correct: Ratio,
    pub plus_incorrect: Ratio,
    pub minus_correct: Ratio,
    pub minus_incorrect: Ratio,
}

impl GroundingBreakdown {
    fn from_counts(counts: &[u64; 4], n: u64) -> Self {
        let [pc, pi, mc, mi] = *counts;
        Self {
            plus: Ratio::new(pc + pi, n),
            minus: Ratio::new(mc + mi, n),
            plus_correct: Ratio::new(pc, n),
            plus_incorrect: Ratio::new(pi, n),
            minus_correct: Ratio::new(mc, n),
            minus_incorrect: Ratio::new(mi, n),
        }
    }

    pub fn get(&self, category: FpvgCategory) -> Ratio {
        match (category.grounded, category.correct) {
            (true, true) => self.plus_correct,
            (true, false) => self.plus_incorrect,
            (false, true) => self.minus_correct,
            (false, false) => self.minus_incorrect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accuracy {
    pub all: Ratio,
    pub rel: Ratio,
    pub irrel: Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpvgAggregates {
    pub n_evaluated: u64,
    pub fpvg: GroundingBreakdown,
    pub mod_fpvg: GroundingBreakdown,
    pub accuracy: Accuracy,
}

fn category_slot(c: FpvgCategory) -> usize {
    match (c.grounded, c.correct) {
        (true, true) => 0,
        (true, false) => 1,
        (false, true) => 2,
        (false, false) => 3,
    }
}

/// Dataset-level fractions over categorized questions.
pub fn aggregate<'a, I>(outcomes: I) -> Result<FpvgAggregates>
where
    I: IntoIterator<Item = &'a QuestionOutcome>,
{
    let mut n = 0u64;
    let mut fpvg = [0u64; 4];
    let mut modified = [0u64; 4];
    let mut correct = [0u64; 3];
    for o in outcomes {
        n += 1;
        fpvg[category_slot(o.category)] += 1;
        modified[category_slot(o.mod_category())] += 1;
        correct[0] += u64::from(o.category.correct);
        correct[1] += u64::from(o.correct_rel);
        correct[2] += u64::from(o.correct_irrel);
    }
    if n == 0 {
        return Err(Error::EmptyEvaluation);
    }
    Ok(FpvgAggregates {
        n_evaluated: n,
        fpvg: GroundingBreakdown::from_counts(&fpvg, n),
        mod_fpvg: GroundingBreakdown::from_counts(&modified, n),
        accuracy: Accuracy {
            all: Ratio::new(correct[0], n),
            rel: Ratio::new(correct[1], n),
            irrel: Ratio::new(correct[2], n),
        },
    })
}

/// Per-question outcomes plus aggregates for one model and one split.
#[derive(Debug, Clone, PartialEq)]
pub struct FpvgReport {
    pub per_question: BTreeMap<String, QuestionOutcome>,
    pub aggregates: FpvgAggregates,
    pub config_fingerprint: String,
}

impl FpvgReport {
    pub fn n_evaluated(&self) -> u64 {
        self.aggregates.n_evaluated
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &QuestionOutcome> {
        self.per_question.values()
    }
}

/// Categorizes every question and aggregates. Questions are expected to be
/// the eligible subset already.
pub fn evaluate<'a, I>(
    questions: I,
    runs: &ConditionRuns<'_>,
    eq: AnswerEq,
    config_fingerprint: impl Into<String>,
) -> Result<FpvgReport>
where
    I: IntoIterator<Item = &'a QuestionRecord>,
{
    let per_question = questions
        .into_iter()
        .map(|q| categorize(&q.question_id, &q.gold_answer, runs, eq).map(|o| (o.question_id.clone(), o)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    report_from_outcomes(per_question, config_fingerprint)
}

/// Builds a report from already categorized questions.
pub fn report_from_outcomes(
    per_question: BTreeMap<String, QuestionOutcome>,
    config_fingerprint: impl Into<String>,
) -> Result<FpvgReport> {
    let aggregates = aggregate(per_question.values())?;
    Ok(FpvgReport {
        per_question,
        aggregates,
        config_fingerprint: config_fingerprint.into(),
    })
}

/// Probability drop of the full-input predicted class when only relevant
/// objects are kept. Negative when the restriction helps.
pub fn sufficiency(p_all: f64, p_rel: f64) -> f64 {
    p_all - p_rel
}

/// Probability drop of the full-input predicted class when only irrelevant
/// objects are kept.
pub fn comprehensiveness(p_all: f64, p_irrel: f64) -> f64 {
    p_all - p_irrel
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuffCompThresholds {
    /// `suff` below this is good.
    pub suff_good: f64,
    /// `comp` below this is bad.
    pub comp_bad: f64,
}

impl Default for SuffCompThresholds {
    fn default() -> Self {
        Self {
            suff_good: 0.01,
            comp_bad: 0.20,
        }
    }
}

impl SuffCompThresholds {
    pub fn is_good_suff(&self, suff: f64) -> bool {
        suff < self.suff_good
    }

    pub fn is_bad_comp(&self, comp: f64) -> bool {
        comp < self.comp_bad
    }
}

/// 2×2 table of questions by suff and comp quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QuadrantCounts {
    pub good_suff_good_comp: u64,
    pub good_suff_bad_comp: u64,
    pub bad_suff_good_comp: u64,
    pub bad_suff_bad_comp: u64,
}

impl QuadrantCounts {
    pub fn total(&self) -> u64 {
        self.good_suff_good_comp + self.good_suff_bad_comp + self.bad_suff_good_comp + self.bad_suff_bad_comp
    }
}

pub fn suff_comp_quadrants<I>(scores: I, thresholds: &SuffCompThresholds) -> QuadrantCounts
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut q = QuadrantCounts::default();
    for (suff, comp) in scores {
        let slot = match (thresholds.is_good_suff(suff), thresholds.is_bad_comp(comp)) {
            (true, false) => &mut q.good_suff_good_comp,
            (true, true) => &mut q.good_suff_bad_comp,
            (false, false) => &mut q.bad_suff_good_comp,
            (false, true) => &mut q.bad_suff_bad_comp,
        };
        *slot += 1;
    }
    q
}

/// Dataset summary of suff and comp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuffCompSummary {
    pub n_scored: u64,
    /// Questions lacking a probability for the full-input predicted class in some run.
    pub n_excluded: u64,
    pub mean_suff: Option<f64>,
    pub mean_comp: Option<f64>,
    pub quadrants: QuadrantCounts,
}

pub fn suff_comp_summary<'a, I>(outcomes: I, thresholds: &SuffCompThresholds) -> SuffCompSummary
where
    I: IntoIterator<Item = &'a QuestionOutcome>,
{
    let mut scored = Vec::new();
    let mut excluded = 0;
    for o in outcomes {
        match (o.suff, o.comp) {
            (Some(s), Some(c)) => scored.push((s, c)),
            _ => excluded += 1,
        }
    }
    let n = scored.len();
    let mean = |f: fn(&(f64, f64)) -> f64| (n > 0).then(|| scored.iter().map(f).sum::<f64>() / n as f64);
    SuffCompSummary {
        n_scored: n as u64,
        n_excluded: excluded,
        mean_suff: mean(|p| p.0),
        mean_comp: mean(|p| p.1),
        quadrants: suff_comp_quadrants(scored.iter().copied(), thresholds),
    }
}

/// Which restricted run an answer flip is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pairing {
    Rel,
    Irrel,
}

impl Pairing {
    pub fn name(&self) -> &'static str {
        match self {
            Pairing::Rel => "rel",
            Pairing::Irrel => "irrel",
        }
    }

    fn flipped(&self, o: &QuestionOutcome) -> bool {
        match self {
            Pairing::Rel => !o.rel_retained,
            Pairing::Irrel => !o.irrel_retained,
        }
    }
}

type TermRow = (&'static str, Pairing, fn(&QuestionOutcome) -> bool);

/// How questions are grouped for flip-rate analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipCategorizer {
    /// Bins of `suff`, flips between full and relevant-only input.
    SuffBins,
    /// Bins of `comp`, flips between full and irrelevant-only input.
    CompBins,
    /// The two terms of the FPVG conjunction and the grounded group.
    FpvgTerms,
}

/// Ascending, finite score bin edges. Defaults to `{0.01, 0.20, 0.40}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinEdges(Vec<f64>);

impl Default for BinEdges {
    fn default() -> Self {
        Self(alloc::vec![0.01, 0.20, 0.40])
    }
}

impl BinEdges {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if let Some(bad) = edges.iter().find(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter { name: "bin_edges", value: *bad });
        }
        if let Some(w) = edges.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter { name: "bin_edges", value: w[1] });
        }
        Ok(Self(edges))
    }

    pub fn edges(&self) -> &[f64] {
        &self.0
    }

    /// Index of the bin holding `v`; bins are `(-inf, e0)`, `[e0, e1)`, …, `[e_last, inf)`.
    pub fn bin_of(&self, v: f64) -> usize {
        self.0.iter().take_while(|e| v >= **e).count()
    }

    pub fn labels(&self) -> Vec<String> {
        let e = &self.0;
        if e.is_empty() {
            return alloc::vec![String::from("all")];
        }
        let mut out = Vec::with_capacity(e.len() + 1);
        out.push(format!("<{}", e[0]));
        for w in e.windows(2) {
            out.push(format!("[{},{})", w[0], w[1]));
        }
        out.push(format!(">={}", e[e.len() - 1]));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipRateRow {
    pub category: String,
    pub pairing: Pairing,
    pub total: u64,
    pub flipped: u64,
}

impl FlipRateRow {
    pub fn rate(&self) -> Ratio {
        Ratio::new(self.flipped, self.total)
    }

    pub fn percent(&self) -> Option<f64> {
        self.rate().value().map(|v| v * 100.0)
    }
}

/// Fraction of questions whose answer flipped, per category.
///
/// Score bins without a computable score skip the question. The FPVG terms
/// yield rows for `Eq(all, rel)` passing / failing (paired with the
/// relevant run), `¬Eq(all, irrel)` passing / failing (paired with the
/// irrelevant run) and the grounded group under both pairings.
pub fn flip_rate_by_category<'a, I>(outcomes: I, categorizer: FlipCategorizer, edges: &BinEdges) -> Vec<FlipRateRow>
where
    I: IntoIterator<Item = &'a QuestionOutcome>,
{
    match categorizer {
        FlipCategorizer::SuffBins | FlipCategorizer::CompBins => {
            let (pairing, prefix) = if categorizer == FlipCategorizer::SuffBins {
                (Pairing::Rel, "suff")
            } else {
                (Pairing::Irrel, "comp")
            };
            let mut rows: Vec<FlipRateRow> = edges
                .labels()
                .into_iter()
                .map(|l| FlipRateRow {
                    category: format!("{prefix} {l}"),
                    pairing,
                    total: 0,
                    flipped: 0,
                })
                .collect();
            for o in outcomes {
                let score = if pairing == Pairing::Rel { o.suff } else { o.comp };
                if let Some(s) = score {
                    let row = &mut rows[edges.bin_of(s)];
                    row.total += 1;
                    row.flipped += u64::from(pairing.flipped(o));
                }
            }
            rows
        }
        FlipCategorizer::FpvgTerms => {
            let terms: [TermRow; 6] = [
                ("left_term_pass", Pairing::Rel, |o| o.rel_retained),
                ("left_term_fail", Pairing::Rel, |o| !o.rel_retained),
                ("right_term_pass", Pairing::Irrel, |o| !o.irrel_retained),
                ("right_term_fail", Pairing::Irrel, |o| o.irrel_retained),
                ("fpvg_plus", Pairing::Rel, |o| o.category.grounded),
                ("fpvg_plus", Pairing::Irrel, |o| o.category.grounded),
            ];
            let mut rows: Vec<FlipRateRow> = terms
                .iter()
                .map(|(name, pairing, _)| FlipRateRow {
                    category: String::from(*name),
                    pairing: *pairing,
                    total: 0,
                    flipped: 0,
                })
                .collect();
            for o in outcomes {
                for (row, (_, pairing, member)) in rows.iter_mut().zip(terms.iter()) {
                    if member(o) {
                        row.total += 1;
                        row.flipped += u64::from(pairing.flipped(o));
                    }
                }
            }
            rows
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::Condition;
    use alloc::vec;
    use proptest::prelude::*;

    const EQ: AnswerEq = AnswerEq::Normalized;

    fn outcome(grounded: bool, correct: bool) -> QuestionOutcome {
        // answers built so the flags follow from Eq(.)
        let gold = "g";
        let all = if correct { "g" } else { "x" };
        let rel = if grounded { all } else { "other" };
        let irrel = if grounded { "z" } else { all };
        let mut runs = [("all", all), ("rel", rel), ("irrel", irrel)]
            .map(|(label, a)| {
                let mut r = PredictionRun::new(Condition::All, label);
                r.insert(PredictionRecord::new("q", a));
                r
            })
            .into_iter();
        let (a, r, i) = (runs.next().unwrap(), runs.next().unwrap(), runs.next().unwrap());
        categorize("q", gold, &ConditionRuns { all: &a, rel: &r, irrel: &i }, EQ).unwrap()
    }

    #[test]
    fn fpvg_examples() {
        assert!(fpvg_question(EQ, "red", "red", "blue"));
        assert!(!fpvg_question(EQ, "red", "red", "red"));
        assert!(!fpvg_question(EQ, "red", "blue", "blue"));
        assert!(mod_fpvg_question(EQ, "red", "red"));
        assert!(!mod_fpvg_question(EQ, "red", "blue"));
        // blind model: same answer everywhere
        assert!(mod_fpvg_question(EQ, "red", "red") && !fpvg_question(EQ, "red", "red", "red"));
    }

    #[test]
    fn categorize_cases() {
        assert_eq!(outcome(true, true).category, FpvgCategory { grounded: true, correct: true });
        assert_eq!(outcome(true, false).category, FpvgCategory { grounded: true, correct: false });
        assert_eq!(outcome(false, true).category, FpvgCategory { grounded: false, correct: true });
        assert_eq!(outcome(false, false).category.label(), "minus_incorrect");
    }

    #[test]
    fn categorize_missing_run_names_label() {
        let mut all = PredictionRun::new(Condition::All, "model/all");
        all.insert(PredictionRecord::new("q", "a"));
        let rel = all.clone();
        let irrel = PredictionRun::new(Condition::Irrel, "model/irrel");
        let err = categorize("q", "a", &ConditionRuns { all: &all, rel: &rel, irrel: &irrel }, EQ).unwrap_err();
        assert_eq!(
            err,
            Error::MissingPrediction { run_label: "model/irrel".into(), question_id: "q".into() }
        );
    }

    #[test]
    fn aggregate_one_per_category() {
        let os: Vec<_> = FpvgCategory::ALL.iter().map(|c| outcome(c.grounded, c.correct)).collect();
        let agg = aggregate(&os).unwrap();
        for c in FpvgCategory::ALL {
            assert_eq!(agg.fpvg.get(c), Ratio::new(1, 4));
        }
        assert_eq!(agg.fpvg.plus, Ratio::new(2, 4));
        assert_eq!(agg.fpvg.plus.to_f64(), 0.5);
    }

    #[test]
    fn aggregate_all_grounded_correct() {
        let os = vec![outcome(true, true); 5];
        let agg = aggregate(&os).unwrap();
        assert_eq!(agg.fpvg.plus_correct.to_f64(), 1.0);
        assert_eq!(agg.fpvg.plus_incorrect.numerator, 0);
        assert_eq!(agg.fpvg.minus_correct.numerator, 0);
        assert_eq!(agg.fpvg.minus_incorrect.numerator, 0);
    }

    #[test]
    fn aggregate_thirds() {
        let os = vec![outcome(true, true), outcome(true, true), outcome(false, false)];
        let agg = aggregate(&os).unwrap();
        assert_eq!(agg.fpvg.plus, Ratio::new(2, 3));
        assert_eq!(agg.accuracy.all, Ratio::new(2, 3));
        assert!((agg.fpvg.plus.to_f64() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn aggregate_empty_is_error() {
        assert_eq!(aggregate(core::iter::empty()), Err(Error::EmptyEvaluation));
    }

    #[test]
    fn suff_comp_examples() {
        assert_eq!(sufficiency(0.9, 0.9), 0.0);
        assert!((sufficiency(0.9, 0.85) - 0.05).abs() < 1e-12);
        assert!((sufficiency(0.6, 0.9) + 0.3).abs() < 1e-12);
        assert_eq!(comprehensiveness(0.9, 0.9), 0.0);
        assert!((comprehensiveness(0.9, 0.3) - 0.6).abs() < 1e-12);
        assert!((comprehensiveness(0.5, 0.7) + 0.2).abs() < 1e-12);
    }

    #[test]
    fn quadrant_examples() {
        let t = SuffCompThresholds::default();
        let q = suff_comp_quadrants([(0.005, 0.10)], &t);
        assert_eq!(q.good_suff_bad_comp, 1);
        let q = suff_comp_quadrants([(0.005, 0.60)], &t);
        assert_eq!(q.good_suff_good_comp, 1);
        let q = suff_comp_quadrants([(0.3, 0.1), (0.3, 0.3)], &t);
        assert_eq!((q.bad_suff_bad_comp, q.bad_suff_good_comp), (1, 1));
        assert_eq!(suff_comp_quadrants(core::iter::empty(), &t), QuadrantCounts::default());
    }

    #[test]
    fn probabilities_feed_suff_comp() {
        let dist = |pairs: &[(&str, f64)]| pairs.iter().map(|(k, v)| (String::from(*k), *v)).collect();
        let mut all = PredictionRun::new(Condition::All, "all");
        all.insert(PredictionRecord::new("q", "red").with_distribution(dist(&[("red", 0.9), ("blue", 0.1)])));
        let mut rel = PredictionRun::new(Condition::Rel, "rel");
        rel.insert(PredictionRecord::new("q", "red").with_distribution(dist(&[("red", 0.85), ("blue", 0.15)])));
        let mut irrel = PredictionRun::new(Condition::Irrel, "irrel");
        irrel.insert(PredictionRecord::new("q", "blue").with_distribution(dist(&[("red", 0.3), ("blue", 0.7)])));
        let o = categorize("q", "red", &ConditionRuns { all: &all, rel: &rel, irrel: &irrel }, EQ).unwrap();
        assert!((o.suff.unwrap() - 0.05).abs() < 1e-12);
        assert!((o.comp.unwrap() - 0.6).abs() < 1e-12);

        // top-1 probability only, and the irrel answer differs: comp unavailable
        let mut irrel = PredictionRun::new(Condition::Irrel, "irrel");
        irrel.insert(PredictionRecord::new("q", "blue").with_prob(0.7));
        let o = categorize("q", "red", &ConditionRuns { all: &all, rel: &rel, irrel: &irrel }, EQ).unwrap();
        assert_eq!(o.comp, None);
        let s = suff_comp_summary([&o], &SuffCompThresholds::default());
        assert_eq!((s.n_scored, s.n_excluded), (0, 1));
    }

    #[test]
    fn flip_rate_examples() {
        let grounded = vec![outcome(true, true), outcome(true, false)];
        let rows = flip_rate_by_category(&grounded, FlipCategorizer::FpvgTerms, &BinEdges::default());
        let plus: Vec<_> = rows.iter().filter(|r| r.category == "fpvg_plus").collect();
        assert_eq!(plus[0].pairing, Pairing::Rel);
        assert_eq!(plus[0].percent(), Some(0.0));
        assert_eq!(plus[1].pairing, Pairing::Irrel);
        assert_eq!(plus[1].percent(), Some(100.0));

        let mut a = outcome(true, true);
        a.suff = Some(0.0);
        let mut b = outcome(false, true);
        b.suff = Some(0.005);
        let rows = flip_rate_by_category([&a, &b], FlipCategorizer::SuffBins, &BinEdges::default());
        assert_eq!(rows[0].category, "suff <0.01");
        assert_eq!((rows[0].total, rows[0].flipped), (2, 1));
        assert_eq!(rows[0].percent(), Some(50.0));
        assert_eq!(rows[1].total, 0);
        assert_eq!(rows[1].percent(), None);
    }

    #[test]
    fn bin_edges() {
        let e = BinEdges::default();
        assert_eq!(e.labels(), vec!["<0.01", "[0.01,0.2)", "[0.2,0.4)", ">=0.4"]);
        assert_eq!(e.bin_of(-0.3), 0);
        assert_eq!(e.bin_of(0.01), 1);
        assert_eq!(e.bin_of(0.39), 2);
        assert_eq!(e.bin_of(0.9), 3);
        assert!(BinEdges::new(vec![0.2, 0.1]).is_err());
        assert!(BinEdges::new(vec![f64::NAN]).is_err());
    }

    fn arb_answer() -> impl Strategy<Value = u8> {
        0u8..4
    }

    proptest! {
        #[test]
        fn fpvg_term_properties(x in arb_answer(), y in arb_answer(), z in arb_answer()) {
            let s = |v: u8| alloc::format!("a{v}");
            if x != y {
                prop_assert!(fpvg_question(EQ, &s(x), &s(x), &s(y)));
                prop_assert!(!fpvg_question(EQ, &s(x), &s(y), &s(z)));
            }
            prop_assert!(mod_fpvg_question(EQ, &s(x), &s(y)) >= fpvg_question(EQ, &s(x), &s(y), &s(z)));
        }

        #[test]
        fn renaming_answers_keeps_categories(
            triples in prop::collection::vec((arb_answer(), arb_answer(), arb_answer(), arb_answer()), 1..30),
            shift in 1u8..7,
        ) {
            let name = |v: u8, k: u8| alloc::format!("ans{}", (v + k) % 11);
            let run = |idx: usize, k: u8| {
                let mut r = PredictionRun::new(Condition::All, "r");
                for (i, t) in triples.iter().enumerate() {
                    let v = [t.0, t.1, t.2][idx];
                    r.insert(PredictionRecord::new(alloc::format!("q{i}"), name(v, k)));
                }
                r
            };
            let cats = |k: u8| {
                let (a, r, i) = (run(0, k), run(1, k), run(2, k));
                let runs = ConditionRuns { all: &a, rel: &r, irrel: &i };
                triples.iter().enumerate()
                    .map(|(j, t)| categorize(&alloc::format!("q{j}"), &name(t.3, k), &runs, EQ).unwrap().category)
                    .collect::<Vec<_>>()
            };
            prop_assert_eq!(cats(0), cats(shift));
        }

        #[test]
        fn suff_comp_are_linear(p in 0.0..1.0f64, q in 0.0..1.0f64, alpha in 0.0..1.0f64) {
            prop_assert!((sufficiency(alpha * p, alpha * q) - alpha * sufficiency(p, q)).abs() < 1e-12);
            prop_assert!((comprehensiveness(alpha * p, alpha * q) - alpha * comprehensiveness(p, q)).abs() < 1e-12);
        }
    }
}
