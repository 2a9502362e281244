use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cocycle-lab"))
}

fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn error_record(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("an error record on stderr");
    serde_json::from_str(line).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn step_prints_a_round_record() {
    let out = run(&["step", "--config", path(&preset("z2.toml"))]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains("\"record\":\"round\""));
}

#[test]
fn certify_accepts_untouched_and_names_edited_clause() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "--config", path(&preset("z2.toml")), "--rounds", "2", "--out", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = dir.path().join("report.jsonl");

    let ok = run(&["certify", path(&report)]);
    assert_eq!(ok.status.code(), Some(0));

    // against fresh runs of the same config and of an edited one
    let preset_text = std::fs::read_to_string(preset("z2.toml")).unwrap().replace("rounds = 3", "rounds = 2");
    let same = dir.path().join("same.toml");
    std::fs::write(&same, &preset_text).unwrap();
    let again = run(&["certify", path(&report), "--config", path(&same)]);
    assert_eq!(again.status.code(), Some(0), "{}", String::from_utf8_lossy(&again.stderr));
    let other = dir.path().join("other.toml");
    std::fs::write(&other, preset_text.replace("eps = \"1/2\"", "eps = \"1/3\"")).unwrap();
    let differs = run(&["certify", path(&report), "--config", path(&other)]);
    assert_eq!(differs.status.code(), Some(1));
    assert_eq!(error_record(&differs)["kind"], "ReportMismatch");

    let text = std::fs::read_to_string(&report).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut rec: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
    rec["eps"] = serde_json::Value::String("1/3".into());
    lines[1] = rec.to_string();
    let edited = dir.path().join("edited.jsonl");
    std::fs::write(&edited, lines.join("\n") + "\n").unwrap();
    let bad = run(&["certify", path(&edited)]);
    assert_eq!(bad.status.code(), Some(1));
    let err = error_record(&bad);
    assert_eq!(err["kind"], "PostconditionFailure");
    assert!(err["message"].as_str().unwrap().contains("clause eps-halving"), "{err}");
}

#[test]
fn six_rounds_at_depth_14_abort_with_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "--config",
        path(&preset("z2.toml")),
        "--rounds",
        "6",
        "--depth",
        "14",
        "--seedless",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["kind"], "DepthExhausted");
    assert!(dir.path().join("checkpoint.json").exists());
    // the partial report still certifies
    let ok = run(&["certify", path(&dir.path().join("report.jsonl"))]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn resume_finishes_an_aborted_infinite_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset("involutions.toml");
    let short = run(&["run-infinite", "--config", path(&cfg), "--depth", "4", "--out", path(dir.path())]);
    assert_eq!(short.status.code(), Some(2));
    let checkpoint = dir.path().join("checkpoint.json");
    let resumed_dir = dir.path().join("resumed");
    let resumed = run(&[
        "run-infinite",
        "--config",
        path(&cfg),
        "--resume",
        path(&checkpoint),
        "--out",
        path(&resumed_dir),
    ]);
    assert!(resumed.status.success(), "{}", String::from_utf8_lossy(&resumed.stderr));
    let text = std::fs::read_to_string(resumed_dir.join("report.jsonl")).unwrap();
    assert!(text.contains("\"status\":\"complete\""));
}

#[test]
fn pipelines_on_their_presets() {
    let bounded = run(&["bounded", "--config", path(&preset("z2-squared.toml"))]);
    assert!(bounded.status.success());
    let text = String::from_utf8(bounded.stdout).unwrap();
    assert!(text.contains("\"record\":\"boundedness\""));

    let norm = run(&["norm-bounded", "--config", path(&preset("direct-sum.toml"))]);
    assert!(norm.status.success());
    assert!(String::from_utf8(norm.stdout).unwrap().contains("\"norm_bound\":\"1\""));

    // Z/2 carries no norm
    let no_norm = run(&["norm-bounded", "--config", path(&preset("z2.toml")), "--rounds", "1"]);
    assert_eq!(no_norm.status.code(), Some(2));
    assert_eq!(error_record(&no_norm)["kind"], "Config");
}

#[test]
fn export_writes_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["export", "--config", path(&preset("z3.toml")), "--rounds", "1", "--out", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["function.csv", "level-set-1.csv", "ladder.csv", "report.jsonl"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let function = std::fs::read_to_string(dir.path().join("function.csv")).unwrap();
    assert!(function.starts_with("word,element\n"));
}

#[test]
fn bad_config_is_a_machine_readable_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(preset("z2.toml")).unwrap().replace("eps = \"1/2\"", "eps = \"2\"");
    std::fs::write(&cfg, text).unwrap();
    let out = run(&["run", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["kind"], "Config");

    let missing = run(&["run", "--config", "/nonexistent.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_record(&missing)["record"], "error");
}
