use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TINY1: &str = r#"{"parts":[["a","b"],["c","d"]],"base_edges":[[0,1,1]],"conflicts":[[[0,0],[1,0]],[[0,0],[1,1]],[[0,1],[1,0]]]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_transversal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn stats_on_tiny1() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "t.json", TINY1);
    let out = run(&["stats", s(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["max_avg_colour_degree"], "3/2");
    assert_eq!(v["mu"], 2);
}

#[test]
fn exact_solve_on_tiny1() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "t.json", TINY1);
    let out = run(&["solve", "--engine", "exact", s(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), serde_json::json!([[0, 1], [1, 1]]));
}

#[test]
fn verify_reports_the_conflicting_edge() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "t.json", TINY1);
    let col = write(&dir, "c.json", "[[0,0],[1,0]]");
    let out = run(&["verify", s(&inst), s(&col)]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["conflicts"], serde_json::json!([[[0, 0], [1, 0]]]));
    assert_eq!(stderr_json(&out)["error"], "not_a_transversal");

    let good = write(&dir, "g.json", "[[0,1],[1,1]]");
    assert_eq!(run(&["verify", s(&inst), s(&good)]).status.code(), Some(0));
}

#[test]
fn infeasible_instance_exits_one() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "k.json",
        r#"{"parts":[["a"],["b"]],"base_edges":[[0,1,1]],"conflicts":[[[0,0],[1,0]]]}"#,
    );
    let out = run(&["solve", s(&inst)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "none");
}

#[test]
fn usage_and_format_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{not json");
    let out = run(&["stats", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "format");

    let inst = write(&dir, "t.json", TINY1);
    let out = run(&["solve", "--engine", "lll", s(&inst)]);
    assert_eq!(out.status.code(), Some(2), "missing seed");

    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn validate_lists_violations() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "v.json",
        r#"{"parts":[["a"],["b"],["c"]],"base_edges":[[0,1,1]],"conflicts":[[[0,0],[2,0]]]}"#,
    );
    let out = run(&["validate", s(&inst)]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["kind"], "not_cover_edge");
}

#[test]
fn generate_round_trips_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let report = dir.path().join("r.json");
    let args = |out: &Path| {
        vec![
            "generate".to_string(),
            "--family".into(),
            "random-cover".into(),
            "--parts".into(),
            "25".into(),
            "--list-size".into(),
            "5".into(),
            "--multiplicity".into(),
            "2".into(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            s(out).into(),
        ]
    };
    let mut first = args(&a);
    first.extend(["--report".into(), s(&report).into()]);
    assert!(bin().args(&first).status().unwrap().success());
    assert!(bin().args(args(&b)).status().unwrap().success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let in_memory: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let from_file = stdout_json(&run(&["stats", s(&a)]));
    assert_eq!(in_memory["stats"], from_file);
}

#[test]
fn generate_needs_a_seed() {
    let out = run(&["generate", "--family", "egl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_solution_verifies_and_repeats() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("g.json");
    assert!(run(&[
        "generate",
        "--family",
        "single-conflict",
        "--parts",
        "40",
        "--list-size",
        "12",
        "--multiplicity",
        "2",
        "--base-density",
        "0.5",
        "--seed",
        "5",
        "--out",
        s(&inst),
    ])
    .status
    .success());
    let mut outputs = Vec::new();
    for name in ["c1", "c2"] {
        let col = dir.path().join(format!("{name}.json"));
        let rep = dir.path().join(format!("{name}.report.json"));
        let out = run(&[
            "--jobs",
            "1",
            "solve",
            "--engine",
            "pipeline",
            "--seed",
            "9",
            s(&inst),
            "--out",
            s(&col),
            "--report",
            s(&rep),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(run(&["verify", s(&inst), s(&col)]).status.code(), Some(0));
        outputs.push((fs::read(&col).unwrap(), fs::read(&rep).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let report: Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert_eq!(report["outcome"], "found");
    assert_eq!(report["instance_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn nibble_monte_carlo_csv() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("g.json");
    assert!(run(&[
        "generate",
        "--family",
        "random-cover",
        "--parts",
        "15",
        "--list-size",
        "8",
        "--edge-prob",
        "0.3",
        "--multiplicity",
        "3",
        "--seed",
        "2",
        "--out",
        s(&inst),
    ])
    .status
    .success());
    let csv = dir.path().join("mc.csv");
    let out = run(&[
        "nibble", s(&inst), "--seed", "4", "--epsilon", "0.5", "--d", "10", "--lambda", "8", "--trials", "100",
        "--out", s(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        headers,
        ["trial", "part", "useable_cols", "expected_useable", "bad_events", "omega_star"]
    );
    assert_eq!(reader.records().count(), 100 * 15);
}

#[test]
fn build_list_cover_from_assignment() {
    let dir = TempDir::new().unwrap();
    let a = write(
        &dir,
        "a.json",
        r#"{"parts":[["1","2"],["2","3"]],"base_edges":[[0,1,1]]}"#,
    );
    let out = run(&["build-cover", "--kind", "list", s(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["conflicts"], serde_json::json!([[[0, 1], [1, 0]]]));
}

#[test]
fn egl_sweep_writes_one_row_per_n() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("egl.csv");
    let args = ["egl-sweep", "--k", "2", "--n-min", "3", "--n-max", "6", "--samples", "50", "--seed", "1"];
    let mut with_out: Vec<&str> = args.to_vec();
    with_out.extend(["--out", s(&csv_path)]);
    let out = run(&with_out);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let found: usize = row[4].parse().unwrap();
        let none: usize = row[5].parse().unwrap();
        assert_eq!(found + none, 50);
    }
    assert_eq!(run(&args[..args.len() - 2]).status.code(), Some(2), "missing seed");
}
