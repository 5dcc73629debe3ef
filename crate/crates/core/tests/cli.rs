mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use common::{fixture_path, golden};
use fpr_consensus::PanelDocument;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpr-consensus")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn example() -> String {
    fixture_path("worked_example.json").to_str().unwrap().to_owned()
}

#[test]
fn analyze_matches_reference_values() {
    let out = run(&["analyze", "--in", &example(), "--delta", "0.65"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let g = golden();
    let cl: Vec<f64> = serde_json::from_value(v["per_expert_cl"].clone()).unwrap();
    for (a, e) in cl.iter().zip(&g.per_expert_cl) {
        assert!((a - e).abs() <= g.tolerances.per_expert_cl, "{a} vs {e}");
    }
    assert!((v["global_cl"].as_f64().unwrap() - g.global_cl).abs() <= g.tolerances.global_cl);
    assert!((v["cr"].as_f64().unwrap() - g.cr).abs() <= g.tolerances.cr);
    assert!((v["ccl"].as_f64().unwrap() - g.ccl).abs() <= g.tolerances.ccl);
    assert!(v["collective_sm"][0][0].is_null());
    assert_eq!(v["rendered"]["ccl"].as_f64(), Some(0.81));
}

#[test]
fn unestimable_panel_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sparse.json");
    std::fs::write(
        &input,
        r#"{"alternatives":["a","b","c","d"],"experts":[
            {"id":"e1","matrix":[[null,0.6,null,null],[null,null,null,null],[null,null,null,0.7],[null,null,null,null]]},
            {"id":"e2","matrix":[[null,0.5,0.5,0.5],[0.5,null,0.5,0.5],[0.5,0.5,null,0.5],[0.5,0.5,0.5,null]]}]}"#,
    )
    .unwrap();
    let out = run(&["complete", "--in", arg(&input), "--out", arg(&dir.path().join("o.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("o.json").exists());
}

#[test]
fn complete_writes_a_full_panel() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("done.json");
    let out = run(&["complete", "--in", &example(), "--out", arg(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = PanelDocument::read(&out_path).unwrap();
    let panel = doc.to_panel().unwrap();
    assert!(panel.relations().iter().all(|r| r.is_complete()));
    let g = golden();
    for (r, expected) in panel.relations().iter().zip(&g.completed) {
        let dev = common::max_grid_dev(|i, k| r.get(i, k).unwrap(), expected);
        assert!(dev <= g.tolerances.completed_cell);
    }
}

#[test]
fn optimize_reaches_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("opt.json");
    let out =
        run(&["optimize", "--in", &example(), "--out", arg(&out_path), "--gamma", "0.89", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&out_path);
    assert!(v["best_ccl"].as_f64().unwrap() >= 0.89);
    assert_eq!(v["termination"], "ThresholdReached");
    assert_eq!(v["seed"], 7);
    assert!(v["suggestions"].as_array().unwrap().iter().all(|s| {
        let from = s["from"].as_f64().unwrap();
        let to = s["to"].as_f64().unwrap();
        (to - from).abs() >= 0.01
    }));
    let best = PanelDocument::from_json(&v["best_panel"].to_string()).unwrap();
    assert!(best.to_panel().unwrap().relations().iter().all(|r| r.is_complete()));
}

#[test]
fn optimize_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["optimize", "--in", &example(), "--out", arg(p), "--seed", "3", "--trace"]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!read_json(&a)["trace"].as_array().unwrap().is_empty());
}

#[test]
fn missed_threshold_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("opt.json");
    let out = run(&[
        "optimize",
        "--in",
        &example(),
        "--out",
        arg(&out_path),
        "--gamma",
        "1.0",
        "--sa-max-trials",
        "500",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = read_json(&out_path);
    assert_eq!(v["termination"], "TrialCapHit");
    assert_eq!(v["trials_used"], 500);
}

#[test]
fn restarts_keep_the_best_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("opt.json");
    let out = run(&[
        "optimize",
        "--in",
        &example(),
        "--out",
        arg(&out_path),
        "--gamma",
        "0.95",
        "--restarts",
        "3",
        "--sa-max-trials",
        "3000",
    ]);
    assert!(matches!(out.status.code(), Some(0) | Some(3)));
    let v = read_json(&out_path);
    let runs = v["restarts"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    let best = v["best_ccl"].as_f64().unwrap();
    assert!(runs.iter().all(|r| r["best_ccl"].as_f64().unwrap() <= best));
}

#[test]
fn invalid_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"alternatives":["a","b","c"],"experts":[{"id":"e1","matrix":[[null,1.4,null],[null,null,null],[null,null,null]]}]}"#).unwrap();
    assert_eq!(run(&["analyze", "--in", arg(&bad)]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--in", arg(&dir.path().join("missing.json"))]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--in", &example(), "--delta", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    let out = dir.path().join("o.json");
    let code =
        run(&["optimize", "--in", &example(), "--out", arg(&out), "--sa-fastfactor", "0.99"]).status.code();
    assert_eq!(code, Some(1));
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&[
            "gen",
            "--n",
            "6",
            "--m",
            "4",
            "--missing",
            "0.3",
            "--noise",
            "0.05",
            "--seed",
            "11",
            "--out",
            arg(p),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let doc = PanelDocument::from_json(&text).unwrap();
    assert_eq!(doc.to_json() + "\n", text);
    assert_eq!(doc.experts.len(), 4);
}

#[test]
fn analyze_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(run(&["analyze", "--in", &example(), "--out", arg(p)]).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
