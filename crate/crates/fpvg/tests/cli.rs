use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fpvg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpvg")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, model: &str) {
    let out = fpvg(&["synth", "--n-questions", "40", "--model", model, "--loo", "--out", s(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn prepare(synth: &Path, out: &Path) {
    let o = fpvg(&[
        "prepare",
        "--questions",
        s(&synth.join("questions.jsonl")),
        "--detections",
        s(&synth.join("detections.jsonl")),
        "--out",
        s(out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn evaluate(synth: &Path, prep: &Path, irrel: &Path, out: &Path) -> Output {
    fpvg(&[
        "evaluate",
        "--questions",
        s(&synth.join("questions.jsonl")),
        "--assignments",
        s(&prep.join("assignments.jsonl")),
        "--pred-all",
        s(&synth.join("predictions_all.jsonl")),
        "--pred-rel",
        s(&synth.join("predictions_rel.jsonl")),
        "--pred-irrel",
        s(irrel),
        "--out",
        s(out),
    ])
}

#[test]
fn full_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let (sy, prep, ev) = (tmp.path().join("s"), tmp.path().join("p"), tmp.path().join("e"));
    synth(&sy, "grounded_oracle");
    prepare(&sy, &prep);

    let m = tmp.path().join("m.jsonl");
    let o = fpvg(&["manifest", "--assignments", s(&prep.join("assignments.jsonl")), "--out", s(&m)]);
    assert!(o.status.success());
    assert_eq!(fs::read(&m).unwrap(), fs::read(sy.join("manifests.jsonl")).unwrap());

    let o = evaluate(&sy, &prep, &sy.join("predictions_irrel.jsonl"), &ev);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&fs::read(ev.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["fpvg"]["plus"]["value"], 1.0);
    assert_eq!(report["n_evaluated"], 40);
    assert_eq!(report["per_question_path"], "per_question.jsonl");
    assert!(ev.join("report.csv").exists());

    let imp = tmp.path().join("i");
    let o = fpvg(&[
        "importance",
        "--assignments",
        s(&prep.join("assignments.jsonl")),
        "--report",
        s(&ev.join("report.json")),
        "--loo-predictions",
        s(&sy.join("predictions_loo.jsonl")),
        "--pred-all",
        s(&sy.join("predictions_all.jsonl")),
        "--out",
        s(&imp),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&fs::read(imp.join("ranking_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["methods"][0]["fpvg_plus"]["n"], 40);
    assert!(summary["methods"][0]["fpvg_minus"].is_null());

    let an = tmp.path().join("a");
    let r = format!("id={}", s(&ev.join("report.json")));
    let r2 = format!("ood={}", s(&ev.join("report.json")));
    let o = fpvg(&["analyze", "--report", &r, "--report", &r2, "--out", s(&an)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(an.join("comparison.csv")).unwrap();
    assert!(csv.starts_with("seed,split,group,correct,incorrect,c2i,degradation\n"));
}

#[test]
fn missing_prediction_exits_with_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (sy, prep) = (tmp.path().join("s"), tmp.path().join("p"));
    synth(&sy, "blind_prior");
    prepare(&sy, &prep);
    let irrel = fs::read_to_string(sy.join("predictions_irrel.jsonl")).unwrap();
    let truncated: String = irrel.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let dropped: Value = serde_json::from_str(irrel.lines().next().unwrap()).unwrap();
    let path = tmp.path().join("irrel.jsonl");
    fs::write(&path, truncated).unwrap();

    let o = evaluate(&sy, &prep, &path, &tmp.path().join("e"));
    assert_eq!(o.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "validation");
    assert_eq!(diag["question_id"], dropped["question_id"]);
    assert_eq!(diag["run_label"], "irrel");
    assert!(!tmp.path().join("e").join("report.json").exists());
}

#[test]
fn malformed_line_reports_location() {
    let tmp = tempfile::tempdir().unwrap();
    let (sy, prep) = (tmp.path().join("s"), tmp.path().join("p"));
    synth(&sy, "blind_prior");
    prepare(&sy, &prep);
    let mut rel = fs::read_to_string(sy.join("predictions_all.jsonl")).unwrap();
    rel.push_str("{\"question_id\":\"extra\",\"answer\":\"x\",\"prob\":1.5}\n");
    let path = tmp.path().join("irrel.jsonl");
    fs::write(&path, &rel).unwrap();
    let o = evaluate(&sy, &prep, &path, &tmp.path().join("e"));
    assert_eq!(o.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["line"], 41);
    assert_eq!(diag["field"], "prob");
}

#[test]
fn io_failure_exits_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.jsonl");
    let o = fpvg(&[
        "prepare",
        "--questions",
        s(&missing),
        "--detections",
        s(&missing),
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "io");
}

#[test]
fn bad_arguments_exit_with_code_1() {
    assert_eq!(fpvg(&["evaluate", "--bogus"]).status.code(), Some(1));
    assert_eq!(fpvg(&["synth", "--model", "mixed", "--out", "x"]).status.code(), Some(1));
    assert_eq!(fpvg(&["--help"]).status.code(), Some(0));
}

#[test]
fn thresholds_flow_into_fingerprint() {
    let tmp = tempfile::tempdir().unwrap();
    let sy = tmp.path().join("s");
    synth(&sy, "grounded_oracle");
    let (qs, ds) = (sy.join("questions.jsonl"), sy.join("detections.jsonl"));
    let run = |out: &Path, extra: &[&str]| {
        let mut args = vec![
            "prepare",
            "--questions",
            s(&qs),
            "--detections",
            s(&ds),
            "--out",
            s(out),
        ];
        args.extend_from_slice(extra);
        let o = fpvg(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config_fingerprint"].as_str().unwrap().to_owned()
    };
    let a = run(&tmp.path().join("a"), &[]);
    let b = run(&tmp.path().join("b"), &["--iou-threshold", "0.6"]);
    assert_ne!(a, b);
    let bad = fpvg(&[
        "prepare",
        "--questions",
        s(&sy.join("questions.jsonl")),
        "--detections",
        s(&sy.join("detections.jsonl")),
        "--out",
        s(tmp.path()),
        "--coverage-threshold",
        "1.5",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}
