mod common;

use std::process::{Command, Output};

use common::fixture;
use serde_json::Value;

fn mecheval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mecheval")).args(args).env_remove("MECHEVAL_DATA_ROOT").output().unwrap()
}

fn path(rel: &str) -> String {
    fixture(rel).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_reports_card_counts() {
    let o = mecheval(&["validate", "--submission", &path("reference_overlap/sub2")]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("ok ") && stdout(&o).contains("(101 cards)"), "{}", stdout(&o));
}

#[test]
fn validate_fails_on_a_broken_card() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("p1")).unwrap();
    std::fs::write(dir.path().join("submission.json"), r#"{"team_id":"t","condition":"machine_only"}"#).unwrap();
    std::fs::write(dir.path().join("p1/bad.card.json"), r#"{"card_id":"bad"}"#).unwrap();
    let o = mecheval(&["validate", "--submission", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().all(|l| l.starts_with("error ")), "{}", stdout(&o));
}

#[test]
fn score_phase2_writes_overlap_json() {
    let o = mecheval(&[
        "score-phase2",
        "--submission",
        &path("reference_overlap/sub2"),
        "--refset",
        &path("reference_overlap/refset.json"),
        "--judgments",
        &path("reference_overlap/judgments.jsonl"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cell = &v["submissions"][0]["overlap"]["direct_phospho_bind"];
    assert_eq!((cell["matches"].as_u64(), cell["percent"].as_u64()), (Some(22), Some(76)));
}

#[test]
fn csv_output_goes_to_a_directory_of_tables() {
    let out = tempfile::tempdir().unwrap();
    let dir = out.path().join("tables");
    let o = mecheval(&[
        "score-phase1",
        "--submission",
        &path("reference_overlap/sub2"),
        "--judgments",
        &path("reference_overlap/judgments.jsonl"),
        "--format",
        "csv",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let precision = std::fs::read_to_string(dir.join("precision.csv")).unwrap();
    assert!(precision.lines().nth(1).unwrap().starts_with("sub2,"), "{precision}");
}

#[test]
fn check_phase3_reports_plausibility() {
    let o = mecheval(&[
        "check-phase3",
        "--model",
        &path("explanations/knockout_model.json"),
        "--observations",
        &path("explanations/knockout_observations.csv"),
        "--explanations",
        &path("explanations/knockout_explanations.json"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["phase3"]["explanations"][0]["verdict"]["overall"], "not_plausible");
}

#[test]
fn missing_inputs_exit_nonzero() {
    let o = mecheval(&["score-phase2", "--submission", &path("reference_overlap/sub2")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refset"));
}

#[test]
fn ingest_then_export_round_trips() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().to_str().unwrap();
    let o = mecheval(&[
        "ingest",
        "--run-id",
        "r1",
        "--phase",
        "3",
        "--model",
        &path("explanations/branching_model.json"),
        "--observations",
        &path("explanations/branching_observations.csv"),
        "--explanations",
        &path("explanations/branching_explanations.json"),
        "--data-root",
        data,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "ingested r1 with 2 review items");

    let again = mecheval(&[
        "ingest",
        "--run-id",
        "r1",
        "--phase",
        "1",
        "--submission",
        &path("reference_overlap/sub2"),
        "--data-root",
        data,
    ]);
    assert_eq!(again.status.code(), Some(1));

    let o = mecheval(&["export", "--run-id", "r1", "--data-root", data]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["run_id"], "r1");
    let pending = v["phase3"]["pending"].as_array().unwrap();
    assert_eq!(pending.len(), 2);
}
