//! Ranking-match scores between object-importance vectors and the
//! annotation-based relevance partition, and leave-one-out importance.
//!
//! Top-K selection orders objects by score descending, then by object index
//! ascending, so ties resolve deterministically.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::answer::AnswerEq;
use crate::metrics::FpvgReport;
use crate::record::{ImportanceVector, PredictionRecord};
use crate::relevance::RelevanceAssignment;
use crate::{Error, Result};

pub const TIE_BREAKING: &str = "score descending, then object index ascending";

#[derive(Debug, Clone, PartialEq)]
pub struct RankingMatchScore {
    pub question_id: String,
    pub method: String,
    /// Percentage of relevant objects found among the top-|relevant| ranked objects.
    pub relevant_score: f64,
    /// Percentage of irrelevant objects found among the top-|irrelevant| ranked objects.
    pub irrelevant_score: f64,
    pub relevant_hits: usize,
    pub relevant_count: usize,
    pub irrelevant_hits: usize,
    pub irrelevant_count: usize,
}

/// Object indices ordered from most to least important.
pub fn rank_objects(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

fn hits(top: &[usize], members: &[usize]) -> usize {
    top.iter().filter(|i| members.binary_search(i).is_ok()).count()
}

pub fn ranking_match(importance: &ImportanceVector, assignment: &RelevanceAssignment) -> Result<RankingMatchScore> {
    if !assignment.eligible {
        return Err(Error::NotEligible {
            question_id: assignment.question_id.clone(),
        });
    }
    let n_objects = assignment.object_count();
    if importance.scores.len() != n_objects {
        return Err(Error::LengthMismatch {
            question_id: importance.question_id.clone(),
            expected: n_objects,
            found: importance.scores.len(),
        });
    }
    let order = rank_objects(&importance.scores);
    let n_rel = assignment.relevant.len();
    let n_irrel = assignment.irrelevant.len();
    let rel_hits = hits(&order[..n_rel], &assignment.relevant);
    let irrel_hits = hits(&order[..n_irrel], &assignment.irrelevant);
    Ok(RankingMatchScore {
        question_id: assignment.question_id.clone(),
        method: importance.method.clone(),
        relevant_score: 100.0 * rel_hits as f64 / n_rel as f64,
        irrelevant_score: 100.0 * irrel_hits as f64 / n_irrel as f64,
        relevant_hits: rel_hits,
        relevant_count: n_rel,
        irrelevant_hits: irrel_hits,
        irrelevant_count: n_irrel,
    })
}

/// Mean ranking-match scores of one question group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupMeans {
    pub n: usize,
    pub relevant: f64,
    pub irrelevant: f64,
}

/// Ranking-match means split by grounding category; a group without
/// questions is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingMatchSummary {
    pub method: String,
    pub fpvg_plus: Option<GroupMeans>,
    pub fpvg_minus: Option<GroupMeans>,
    /// Scored questions absent from the report.
    pub unmatched: usize,
}

/// Means of scores per group key. Questions mapped to `None` are skipped.
pub fn ranking_match_by_group<'a, I, K, F>(scores: I, mut group_of: F) -> BTreeMap<K, GroupMeans>
where
    I: IntoIterator<Item = &'a RankingMatchScore>,
    K: Ord,
    F: FnMut(&RankingMatchScore) -> Option<K>,
{
    let mut sums: BTreeMap<K, (usize, f64, f64)> = BTreeMap::new();
    for s in scores {
        if let Some(key) = group_of(s) {
            let e = sums.entry(key).or_insert((0, 0.0, 0.0));
            e.0 += 1;
            e.1 += s.relevant_score;
            e.2 += s.irrelevant_score;
        }
    }
    sums.into_iter()
        .map(|(k, (n, r, i))| {
            (
                k,
                GroupMeans {
                    n,
                    relevant: r / n as f64,
                    irrelevant: i / n as f64,
                },
            )
        })
        .collect()
}

pub fn ranking_match_by_fpvg(scores: &[RankingMatchScore], report: &FpvgReport) -> RankingMatchSummary {
    let mut unmatched = 0;
    let groups = ranking_match_by_group(scores, |s| match report.per_question.get(&s.question_id) {
        Some(o) => Some(o.category.grounded),
        None => {
            unmatched += 1;
            None
        }
    });
    RankingMatchSummary {
        method: scores.first().map(|s| s.method.clone()).unwrap_or_default(),
        fpvg_plus: groups.get(&true).copied(),
        fpvg_minus: groups.get(&false).copied(),
        unmatched,
    }
}

/// Importance from leave-one-out runs: `scores[k] = p_base(â) − p_loo(k)(â)`
/// where `â` is the base prediction. `loo_runs[k]` omits object `k`.
pub fn loo_importance(
    base: &PredictionRecord,
    loo_runs: &[&PredictionRecord],
    eq: AnswerEq,
    method: &str,
) -> Result<ImportanceVector> {
    let missing = |run_label: String| Error::MissingProbability {
        question_id: base.question_id.clone(),
        run_label,
    };
    let p_base = base
        .probability_of(&base.answer, eq)
        .ok_or_else(|| missing(String::from("base")))?;
    let scores = loo_runs
        .iter()
        .enumerate()
        .map(|(k, r)| {
            r.probability_of(&base.answer, eq)
                .map(|p| p_base - p)
                .ok_or_else(|| missing(alloc::format!("loo({k})")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImportanceVector {
        question_id: base.question_id.clone(),
        method: String::from(method),
        scores,
    })
}
