//! Object-index manifests for the test conditions.
//!
//! A manifest lists, in ascending detection order, which objects of an
//! image make up the visual input for one question under one condition.
//! How excluded rows are handled (zero-padding, compaction) is left to the
//! model runner.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::relevance::RelevanceAssignment;
use crate::{Error, Result};

/// Visual-input condition of a test run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// Every detected object.
    All,
    /// Relevant objects only.
    Rel,
    /// Irrelevant objects only.
    Irrel,
    /// Every object except the one at this index.
    Loo(usize),
}

impl Condition {
    /// Wire name used in manifests (`loo` carries its index separately).
    pub fn name(&self) -> &'static str {
        match self {
            Condition::All => "all",
            Condition::Rel => "rel",
            Condition::Irrel => "irrel",
            Condition::Loo(_) => "loo",
        }
    }

    pub fn loo_index(&self) -> Option<usize> {
        match self {
            Condition::Loo(k) => Some(*k),
            _ => None,
        }
    }

    pub fn from_parts(name: &str, loo_index: Option<usize>) -> Option<Self> {
        match (name, loo_index) {
            ("all", None) => Some(Condition::All),
            ("rel", None) => Some(Condition::Rel),
            ("irrel", None) => Some(Condition::Irrel),
            ("loo", Some(k)) => Some(Condition::Loo(k)),
            _ => None,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Loo(k) => write!(f, "loo({k})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub question_id: String,
    pub condition: Condition,
    pub object_indices: Vec<usize>,
}

/// The `all` / `rel` / `irrel` manifests of one question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionManifests {
    pub all: Manifest,
    pub rel: Manifest,
    pub irrel: Manifest,
}

impl ConditionManifests {
    pub fn into_vec(self) -> Vec<Manifest> {
        alloc::vec![self.all, self.rel, self.irrel]
    }
}

/// Builds the three condition manifests. Refuses ineligible questions.
pub fn build_condition_manifests(assignment: &RelevanceAssignment) -> Result<ConditionManifests> {
    if !assignment.eligible {
        return Err(Error::NotEligible {
            question_id: assignment.question_id.clone(),
        });
    }
    let make = |condition, object_indices| Manifest {
        question_id: assignment.question_id.clone(),
        condition,
        object_indices,
    };
    Ok(ConditionManifests {
        all: make(Condition::All, (0..assignment.object_count()).collect()),
        rel: make(Condition::Rel, assignment.relevant.clone()),
        irrel: make(Condition::Irrel, assignment.irrelevant.clone()),
    })
}

/// One manifest per object, each omitting exactly that object.
pub fn build_loo_manifests(assignment: &RelevanceAssignment) -> Vec<Manifest> {
    let n = assignment.object_count();
    (0..n)
        .map(|k| Manifest {
            question_id: assignment.question_id.clone(),
            condition: Condition::Loo(k),
            object_indices: (0..n).filter(|&i| i != k).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn simple_conditions() {
        let a = RelevanceAssignment::from_sets("q", [0], [1], []);
        let m = build_condition_manifests(&a).unwrap();
        assert_eq!(m.all.object_indices, vec![0, 1]);
        assert_eq!(m.rel.object_indices, vec![0]);
        assert_eq!(m.irrel.object_indices, vec![1]);
        assert_eq!(m.irrel.condition, Condition::Irrel);
    }

    #[test]
    fn neither_objects_only_in_all() {
        let a = RelevanceAssignment::from_sets("q", [2], [0, 3], [1]);
        let m = build_condition_manifests(&a).unwrap();
        assert_eq!(m.all.object_indices, vec![0, 1, 2, 3]);
        assert_eq!(m.rel.object_indices, vec![2]);
        assert_eq!(m.irrel.object_indices, vec![0, 3]);
    }

    #[test]
    fn ineligible_is_refused() {
        let a = RelevanceAssignment::from_sets("q", [], [0, 1], []);
        assert_eq!(
            build_condition_manifests(&a),
            Err(Error::NotEligible { question_id: "q".into() })
        );
    }

    #[test]
    fn loo_examples() {
        let a = RelevanceAssignment::from_sets("q", [0], [1, 2], []);
        let lists: Vec<_> = build_loo_manifests(&a).into_iter().map(|m| m.object_indices).collect();
        assert_eq!(lists, vec![vec![1, 2], vec![0, 2], vec![0, 1]]);

        let single = RelevanceAssignment::from_sets("q", [0], [], []);
        let lists: Vec<_> = build_loo_manifests(&single).into_iter().map(|m| m.object_indices).collect();
        assert_eq!(lists, vec![Vec::<usize>::new()]);

        let big = RelevanceAssignment::from_sets("q", 0..10, 10..100, []);
        let ms = build_loo_manifests(&big);
        assert_eq!(ms.len(), 100);
        assert!(ms.iter().all(|m| m.object_indices.len() == 99));
    }

    #[test]
    fn condition_names_round_trip() {
        for c in [Condition::All, Condition::Rel, Condition::Irrel, Condition::Loo(7)] {
            assert_eq!(Condition::from_parts(c.name(), c.loo_index()), Some(c));
        }
        assert_eq!(Condition::from_parts("loo", None), None);
        assert_eq!(Condition::from_parts("rel", Some(1)), None);
        assert_eq!(alloc::format!("{}", Condition::Loo(3)), "loo(3)");
    }

    fn arb_assignment() -> impl Strategy<Value = RelevanceAssignment> {
        prop::collection::vec(0u8..3, 2..40).prop_filter_map("needs rel and irrel", |labels| {
            let pick = |l| labels.iter().enumerate().filter(move |(_, x)| **x == l).map(|(i, _)| i);
            let a = RelevanceAssignment::from_sets("q", pick(0), pick(1), pick(2));
            a.eligible.then_some(a)
        })
    }

    proptest! {
        #[test]
        fn manifest_invariants(a in arb_assignment()) {
            let m = build_condition_manifests(&a).unwrap();
            for list in [&m.all.object_indices, &m.rel.object_indices, &m.irrel.object_indices] {
                prop_assert!(list.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(list.iter().all(|i| m.all.object_indices.contains(i)));
            }
            prop_assert!(m.rel.object_indices.iter().all(|i| !m.irrel.object_indices.contains(i)));

            let loo = build_loo_manifests(&a);
            let n = a.object_count();
            prop_assert_eq!(loo.len(), n);
            let omitted: usize = loo.iter().map(|m| n - m.object_indices.len()).sum();
            prop_assert_eq!(omitted, n);
            for (k, m) in loo.iter().enumerate() {
                prop_assert!(!m.object_indices.contains(&k));
                prop_assert_eq!(m.condition, Condition::Loo(k));
            }
            prop_assert_eq!(build_condition_manifests(&a).unwrap(), m);
        }
    }
}
