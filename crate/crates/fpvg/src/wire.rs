//! `assignments.jsonl` and `manifests.jsonl`.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::Path;

use fpvg_core::{Condition, Manifest, RelevanceAssignment};
use serde::Serialize;

use crate::error::Result;
use crate::ingest::{for_each_line, open};

#[derive(Serialize)]
struct AssignmentLine<'a> {
    question_id: &'a str,
    relevant: &'a [usize],
    irrelevant: &'a [usize],
    neither: &'a [usize],
    eligible: bool,
}

pub fn write_assignments<'a, W, I>(w: &mut W, assignments: I) -> io::Result<()>
where
    W: Write + ?Sized,
    I: IntoIterator<Item = &'a RelevanceAssignment>,
{
    for a in assignments {
        serde_json::to_writer(
            &mut *w,
            &AssignmentLine {
                question_id: &a.question_id,
                relevant: &a.relevant,
                irrelevant: &a.irrelevant,
                neither: &a.neither,
                eligible: a.eligible,
            },
        )?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn parse_assignments(path: &Path) -> Result<BTreeMap<String, RelevanceAssignment>> {
    read_assignments(open(path)?, &path.display().to_string())
}

/// Reads assignments keyed by question id; each must be a consistent partition.
pub fn read_assignments<R: BufRead>(reader: R, file: &str) -> Result<BTreeMap<String, RelevanceAssignment>> {
    let mut out = BTreeMap::new();
    for_each_line(reader, file, |l| {
        let a = RelevanceAssignment {
            question_id: l.string("question_id")?,
            relevant: l.index_list("relevant")?,
            irrelevant: l.index_list("irrelevant")?,
            neither: l.index_list("neither")?,
            eligible: l.boolean("eligible")?,
        };
        if !a.is_consistent() {
            return Err(l.err(
                "relevant",
                "sets must be sorted, disjoint, cover 0..n and agree with `eligible`",
            ));
        }
        if out.contains_key(&a.question_id) {
            return Err(l.err("question_id", format!("duplicate question id `{}`", a.question_id)));
        }
        out.insert(a.question_id.clone(), a);
        Ok(())
    })?;
    Ok(out)
}

#[derive(Serialize)]
struct ManifestLine<'a> {
    question_id: &'a str,
    condition: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    loo_index: Option<usize>,
    object_indices: &'a [usize],
}

pub fn write_manifests<'a, W, I>(w: &mut W, manifests: I) -> io::Result<()>
where
    W: Write + ?Sized,
    I: IntoIterator<Item = &'a Manifest>,
{
    for m in manifests {
        serde_json::to_writer(
            &mut *w,
            &ManifestLine {
                question_id: &m.question_id,
                condition: m.condition.name(),
                loo_index: m.condition.loo_index(),
                object_indices: &m.object_indices,
            },
        )?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn parse_manifests(path: &Path) -> Result<Vec<Manifest>> {
    read_manifests(open(path)?, &path.display().to_string())
}

pub fn read_manifests<R: BufRead>(reader: R, file: &str) -> Result<Vec<Manifest>> {
    let mut out = Vec::new();
    for_each_line(reader, file, |l| {
        let question_id = l.string("question_id")?;
        let name = l.string("condition")?;
        let loo_index = l.opt_index("loo_index")?;
        let condition = Condition::from_parts(&name, loo_index).ok_or_else(|| {
            l.err(
                "condition",
                "expected all | rel | irrel, or loo together with loo_index",
            )
        })?;
        let object_indices = l.index_list("object_indices")?;
        if !object_indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(l.err("object_indices", "indices must be strictly ascending"));
        }
        out.push(Manifest {
            question_id,
            condition,
            object_indices,
        });
        Ok(())
    })?;
    out.sort_by(|a, b| (&a.question_id, a.condition).cmp(&(&b.question_id, b.condition)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_round_trip() {
        let a = RelevanceAssignment::from_sets("q1", [2], [0, 3], [1]);
        let mut buf = Vec::new();
        write_assignments(&mut buf, [&a]).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"question_id\":\"q1\",\"relevant\":[2],\"irrelevant\":[0,3],\"neither\":[1],\"eligible\":true}\n"
        );
        let back = read_assignments(buf.as_slice(), "a").unwrap();
        assert_eq!(back["q1"], a);
    }

    #[test]
    fn inconsistent_assignment_rejected() {
        let overlap = r#"{"question_id":"q","relevant":[0],"irrelevant":[0],"neither":[],"eligible":true}"#;
        assert!(read_assignments(overlap.as_bytes(), "a").is_err());
        let wrong_flag = r#"{"question_id":"q","relevant":[0],"irrelevant":[],"neither":[1],"eligible":true}"#;
        assert!(read_assignments(wrong_flag.as_bytes(), "a").is_err());
    }

    #[test]
    fn manifests_round_trip() {
        let ms = vec![
            Manifest {
                question_id: "q1".into(),
                condition: Condition::All,
                object_indices: vec![0, 1, 2],
            },
            Manifest {
                question_id: "q1".into(),
                condition: Condition::Loo(1),
                object_indices: vec![0, 2],
            },
        ];
        let mut buf = Vec::new();
        write_manifests(&mut buf, &ms).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("{\"question_id\":\"q1\",\"condition\":\"loo\",\"loo_index\":1,\"object_indices\":[0,2]}"));
        assert_eq!(read_manifests(buf.as_slice(), "m").unwrap(), ms);
        let bad = r#"{"question_id":"q","condition":"loo","object_indices":[0]}"#;
        assert!(read_manifests(bad.as_bytes(), "m").is_err());
    }
}
