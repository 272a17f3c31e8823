use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raag-vcd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn graph_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

const P5: &str = "# path on five nodes\nedge a b\nedge b c\nedge c d\nedge d e\n";

#[test]
fn analyze_path_json() {
    let f = graph_file(P5);
    let out = run(&["analyze", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["exact"], 5);
    assert_eq!(v["theorems"], serde_json::json!(["Tree"]));
    assert_eq!(v["anomalies"], serde_json::json!([]));
}

#[test]
fn analyze_witness_lists_generators() {
    let f = graph_file(P5);
    let out = run(&["analyze", f.path().to_str().unwrap(), "--witness", "--e0", "b,c", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let gens = v["generator_set"]["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 7);
}

#[test]
fn analyze_text_lists_theorems() {
    let f = graph_file(P5);
    let out = run(&["analyze", f.path().to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("vcd = 5"));
    assert!(text.contains("theorems: Tree"));
}

#[test]
fn psigma_three_one() {
    let out = run(&["psigma", "3", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["vcd"], 3);
    assert_eq!(v["generators"].as_array().unwrap().len(), 4);
    assert_eq!(v["outer_rank"], 3);
}

#[test]
fn ideal_complex_two_one() {
    let out = run(&["ideal-complex", "2", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(v["homology"]["trivial"], true);
    assert_eq!(v["certificate"]["certified"], true);
}

#[test]
fn star_is_ineligible() {
    let f = graph_file("edge c a\nedge c b\nedge c d\n");
    let out = run(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_input_exits_one() {
    let f = graph_file("edge a\n");
    assert_eq!(run(&["analyze", f.path().to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "/nonexistent/graph"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["psigma", "1", "0"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_round_trips() {
    let f = graph_file(P5);
    let out = run(&["analyze", f.path().to_str().unwrap(), "--json"]);
    let v = json_of(&out);
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
}

#[test]
fn verify_small_corpus() {
    let out = run(&["verify", "--max-nodes", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failures"].as_array().unwrap().is_empty()));
}
