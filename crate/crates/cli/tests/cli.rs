use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fraisse-rank"));
    c.env_remove("RANK_MAX_HOST");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CYCLE3: &str = r#"{"signature":{"relations":[{"name":"E","arity":2}],"unaries":[]},"size":3,"tuples":{"E":[[0,1],[1,2],[2,0]]}}"#;
const PATH3: &str = r#"{"signature":{"relations":[{"name":"E","arity":2}],"unaries":[]},"size":3,"tuples":{"E":[[0,1],[1,0],[1,2],[2,1]]}}"#;

#[test]
fn rank_of_a_chain() {
    let out = run(&["rank", "--class", "linear-order", "--size", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rank"], "3");
    let out = run(&["rank", "--class", "linear-order", "--size", "13", "--subset", "2,7"]);
    assert_eq!(json(&out)["rank"], "1");
}

#[test]
fn rank_of_a_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p3.json", PATH3);
    let out = run(&["rank", "--host", &p, "--class", "graph"]);
    assert_eq!(out.status.code(), Some(0));
    // II answers with an endpoint, after which both one-point types exist
    assert_eq!(json(&out)["rank"], "2");
    assert_eq!(json(&run(&["rank", "--host", &p, "--class", "graph", "--subset", "1"]))["rank"], "0");
    let out = run(&["rank", "--host", &p, "--class", "graph", "--subset", "0,1,2"]);
    let v = json(&out);
    assert_eq!(v["rank"], "0");
    assert!(v["witness"]["unrealized"].is_object());
}

#[test]
fn ordinal_calculator() {
    let cases = [
        (["ordinal", "rank", "w*2"], "w+1"),
        (["ordinal", "rank", "w^2*3+w*5"], "w*2+1"),
        (["ordinal", "zrank", "w^2*3"], "w*3+1"),
        (["ordinal", "rank", "13"], "3"),
    ];
    for (args, want) in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(json(&out)["rank"], want, "{args:?}");
    }
    let out = run(&["ordinal", "certify", "w*8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn exit_codes() {
    let out = run(&["ordinal", "rank", "w+"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 2"));

    assert_eq!(run(&["rank", "--class", "nonsense", "--size", "3"]).status.code(), Some(2));
    assert_eq!(run(&["rank", "--host", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    assert_eq!(run(&["rank", "--class", "linear-order", "--size", "30"]).status.code(), Some(3));
    let out = bin().env("RANK_MAX_HOST", "40").args(["rank", "--class", "linear-order", "--size", "30"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rank"], "4");
    let out = bin().env("RANK_MAX_HOST", "lots").args(["ordinal", "rank", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_and_fails_on_injected_fault() {
    let out = run(&["verify", "--suite", "linear-orders", "interval-characterization", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], 2);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["interval-characterization", "linear-orders"]);

    let out = run(&["verify", "--suite", "injected-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert_eq!(v["first_failure"]["suite"], "injected-fault");
    assert!(!v["first_failure"]["counterexample"].is_null());
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "rank-property", "unary-classes", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["construct", "hn", "--class", "graph", "--n", "3"]);
    let d = run(&["construct", "hn", "--class", "graph", "--n", "3"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn construct_then_certify() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("h3.json");
    let out = run(&["construct", "hn", "--class", "graph", "--n", "3", "--out", h3.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["size"], 11);
    let h = h3.to_str().unwrap();
    let out = run(&["certify", "--host", h, "--cover", "--no-complete", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);
    // three layers cannot certify the absence of a triangle
    let out = run(&["certify", "--host", h, "--no-complete", "2"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["rank", "--host", h, "--class", "graph"]);
    assert_eq!(json(&out)["rank"], "3");

    let t = dir.path().join("t3.json");
    run(&["construct", "hn", "--class", "tournament", "--n", "3", "--out", t.to_str().unwrap()]);
    let out = run(&["certify", "--host", t.to_str().unwrap(), "--class", "tournament", "--cover"]);
    assert_eq!(out.status.code(), Some(0));

    let p = write(dir.path(), "p3.json", PATH3);
    assert_eq!(run(&["certify", "--host", &p, "--cover"]).status.code(), Some(2));
}

#[test]
fn kernel_and_sum_constructions() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = write(dir.path(), "c3.json", CYCLE3);
    let empty = write(
        dir.path(),
        "empty.json",
        r#"{"signature":{"relations":[{"name":"E","arity":2}],"unaries":[]},"size":0}"#,
    );
    let out = run(&["construct", "kernel", "--kernel", &empty, "--leaves", &c3, &c3, "--mode", "tournament-sum"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["structure"]["size"], 6);
    assert_eq!(v["leaf_maps"][1], serde_json::json!([3, 4, 5]));

    let one = write(
        dir.path(),
        "one.json",
        r#"{"signature":{"relations":[{"name":"E","arity":2}],"unaries":[]},"size":1}"#,
    );
    let out = run(&["construct", "kernel", "--kernel", &one, "--leaves", &c3, &c3, "--embeddings", "2", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["structure"]["size"], 5);
    let out = run(&["construct", "kernel", "--kernel", &one, "--leaves", &c3, "--embeddings", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["construct", "sum", "--kind", "tournament", "--parts", &c3, &c3]);
    assert_eq!(json(&out)["size"], 6);
}

#[test]
fn game_solve_and_play() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = write(dir.path(), "c3.json", CYCLE3);
    let out = run(&["game", "--host", &c3, "--class", "tournament", "--solve"]);
    assert_eq!(out.status.code(), Some(0));
    let solved = json(&out)["value"].clone();
    let ranked = json(&run(&["rank", "--host", &c3, "--class", "tournament"]))["rank"].clone();
    assert_eq!(solved, ranked);

    // the human plays I against an optimal II, and II eventually loses
    let mut child = bin()
        .args(["game", "--host", &c3, "--class", "tournament", "--interactive", "--as", "one"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"type 7\ntype 0\ntype 0\ntype 0\ntype 0\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["lost_at"].is_u64(), "{v}");
    let transcript = String::from_utf8_lossy(&out.stderr);
    assert!(transcript.contains("illegal move"));
    assert!(transcript.contains("legal: type 0"));
}

#[test]
fn pretty_verify_is_a_table() {
    let out = run(&["--pretty", "verify", "--suite", "linear-orders"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("suite"));
    assert!(text.contains("linear-orders"));
}
