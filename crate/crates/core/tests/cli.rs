use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_rdfstar2pg");

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("RDFSTAR2PG_NO_COLOR", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn convert_case8_rpt() {
    let o = run(&["convert", corpus("case8.ttls").to_str().unwrap(), "--approach", "rpt", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let edges = v["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 1);
    assert!(edges[0]["properties"].get("certainty").is_some());
}

#[test]
fn convert_case9_pgt_is_lossy() {
    let o = run(&["convert", corpus("case9.ttls").to_str().unwrap(), "--approach", "pgt"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lossy conversion"));
}

#[test]
fn convert_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.ttls");
    std::fs::write(&input, "").unwrap();
    let o = run(&["convert", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"nodes\":[],\"edges\":[]}\n");
}

#[test]
fn convert_writes_output_and_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.graphml");
    let report = dir.path().join("report.json");
    let o = run(&[
        "convert",
        corpus("case3.1.ttls").to_str().unwrap(),
        "--format",
        "graphml",
        "-o",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().contains("<graphml"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["total_statements"], 4);
}

#[test]
fn missing_input_and_bad_flags() {
    assert_eq!(run(&["convert", "/nonexistent/input.ttls"]).status.code(), Some(1));
    assert_eq!(run(&["convert", "-", "--format", "rdfxml"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn conformance_default_run() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("out.json");
    let o = run(&["conformance", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    let rows = table.lines().filter(|l| l.ends_with("PASS") || l.ends_with("FAIL")).count();
    assert_eq!(rows, 69);
    assert!(table.contains("69/69 rows passed"));
    assert!(!table.contains('\x1b'));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), rows);
}

#[test]
fn conformance_hybrid_aggregate() {
    let o = run(&["conformance", "--approaches", "hybrid"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("converted 44/44 (1.000)"));
}

#[test]
fn inspect_corpus_files() {
    let o = run(&["inspect", corpus("case13.ttls").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.starts_with("1 statement, 0 named graphs\n"));
    assert!(text.contains("StarSubject"));
    assert!(text.contains("max depth: 2"));

    let text = stdout(&run(&["inspect", corpus("case6.trigs").to_str().unwrap()]));
    assert!(text.starts_with("5 statements, 2 named graphs\n"));

    let text = stdout(&run(&["inspect", corpus("case1.ttls").to_str().unwrap()]));
    assert_eq!(text, "1 statement, 0 named graphs\nkinds: 1 ObjectProperty\nmax depth: 0\n");
}
