use std::path::PathBuf;
use std::process::{Command, Output};

use seclab_cli::{exit_code, JobStatus, Report};

fn write_manifest(tag: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("seclab-cli-{tag}-{}.gxf", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn seclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seclab")).args(args).output().unwrap()
}

fn run(tag: &str, text: &str) -> (Option<i32>, String, String) {
    let path = write_manifest(tag, text);
    let out = seclab(&["run", path.to_str().unwrap(), "--no-timing"]);
    let _ = std::fs::remove_file(&path);
    (out.status.code(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

const EXAMPLES: &str = "\
group S3 perm 3 [(0 1), (0 1 2)]
group C1 preset C1
group C2 preset C2
group C3 preset C3
group C4 preset C4
job jordan S3 sub=[2]
action inv C2 C3 table [[0, 1, 2], [0, 2, 1]]
job h1 inv
hom iota C2 C4 [2]
hom pi C4 C2 [1]
extension Z4 C2 C4 C2 iota pi
hom s C1 C4 [0]
sections L Z4 { s }
job sections Z4
job verify L
";

#[test]
fn worked_examples() {
    let (code, out, _) = run("examples", EXAMPLES);
    assert_eq!(code, Some(0), "{out}");
    let jordan = out.split("\n\n").next().unwrap();
    assert!(jordan.contains("subgroup_order = 3"), "{jordan}");
    assert!(jordan.contains("union = 3\n"));
    assert!(jordan.contains("covers = false"));
    assert!(jordan.contains("bound = 5"));
    assert!(out.contains("== job 2: h1 inv\n"));
    assert!(out.contains("classes = 1\n"));
    let verify = out.split("== job 4").nth(1).unwrap();
    assert!(verify.contains("b = true") && verify.contains("c = false"), "{verify}");
    let sections = out.split("== job 3").nth(1).unwrap().split("== job 4").next().unwrap();
    assert!(sections.contains("sections = 0"), "{sections}");
}

#[test]
fn unknown_name_is_a_validation_error() {
    let (code, out, err) = run("unknown", "group C2 preset C2\njob h1 X9\n");
    assert_eq!(code, Some(1));
    assert!(out.is_empty());
    assert!(err.contains("2:8: unknown name `X9`"), "{err}");
}

#[test]
fn failing_job_exits_one() {
    let (code, out, _) = run("badjob", "group S3 preset S3\njob decide S3 prop=b\n");
    assert_eq!(code, Some(1));
    assert!(out.contains("status = error"));
}

#[test]
fn syntax_error_exits_one() {
    let (code, _, err) = run("syntax", "group S3 perm 3 [(0 1), (0 1 2)\n");
    assert_eq!(code, Some(1));
    assert!(err.contains("syntax error"), "{err}");
}

#[test]
fn equivalence_failure_has_priority() {
    let mut ok = Report::new(1, "h1 M");
    ok.status = JobStatus::Ok;
    let mut bad = Report::new(2, "decide L prop=q");
    bad.status = JobStatus::Error("unknown property".into());
    let mut failed = Report::new(3, "verify L");
    failed.status = JobStatus::EquivalenceFailed;
    assert_eq!(exit_code(&[ok.clone()]), 0);
    assert_eq!(exit_code(&[ok.clone(), bad.clone()]), 1);
    assert_eq!(exit_code(&[bad, failed, ok]), 2);
}

#[test]
fn gen_bounds_and_structured_output() {
    assert_eq!(seclab(&["gen", "--max-order=65", "--seed=1"]).status.code(), Some(1));
    let small = seclab(&["gen", "--max-order=8", "--seed=3"]);
    assert_eq!(small.status.code(), Some(0));
    let path = write_manifest("small", &String::from_utf8(small.stdout).unwrap());
    let out = seclab(&["run", path.to_str().unwrap(), "--format=structured", "--no-timing"]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let jobs = doc.as_array().unwrap();
    assert!(!jobs.is_empty());
    assert!(jobs.iter().all(|j| j["status"] == "ok" && j.get("elapsed_ms").is_none()));
}
