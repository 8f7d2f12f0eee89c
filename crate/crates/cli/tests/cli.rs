use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xhsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xhsp")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn strip_times(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_time_ms");
            map.values_mut().for_each(strip_times);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_times),
        _ => {}
    }
}

#[test]
fn solve_succeeds_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = xhsp(&["solve", "--group", "p=11,k=1,exp=p", "--trials", "12", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (mut ra, mut rb) = (read_json(&a), read_json(&b));
    assert_eq!(ra["schema"], 1);
    assert_eq!(ra["config"]["path"], "auto");
    assert_eq!(ra["aggregates"]["success_rate"], 1.0);
    let trials = ra["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 12);
    let mean_queries = trials.iter().map(|t| t["queries"].as_f64().unwrap()).sum::<f64>() / 12.0;
    assert!((ra["aggregates"]["mean_queries"].as_f64().unwrap() - mean_queries).abs() < 1e-9);
    strip_times(&mut ra);
    strip_times(&mut rb);
    assert_eq!(ra, rb);
}

#[test]
fn planted_subgroup_file() {
    let dir = tempfile::tempdir().unwrap();
    let planted = dir.path().join("h.json");
    std::fs::write(&planted, "[[1,0,0],[0,1,0]]").unwrap();
    let out = dir.path().join("r.json");
    let o = xhsp(&[
        "solve", "--group", "p=11,k=1,exp=p", "--trials", "2", "--planted", planted.to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let r = read_json(&out);
    for t in r["trials"].as_array().unwrap() {
        assert_eq!(t["success"], true);
        assert_eq!(t["branch"], "center_in_subgroup");
        assert_eq!(t["triple_resamples"], 0);
    }
}

#[test]
fn enumerate_and_dense_backend_on_order_27() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = xhsp(&[
        "solve", "--group", "p=3,k=1,exp=p", "--enumerate-subgroups", "--backend", "dense", "--path", "constant-exp",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert_eq!(r["aggregates"]["trials"], 19);
    assert_eq!(r["aggregates"]["successes"], 19);
    assert_eq!(r["config"]["backend"], "dense");
}

#[test]
fn rejects_bad_input() {
    assert_eq!(xhsp(&["solve", "--group", "p=5,k=1,exp=p", "--backend", "dense"]).status.code(), Some(2));
    assert_eq!(xhsp(&["solve", "--group", "p=4,k=1,exp=p"]).status.code(), Some(2));
    assert_eq!(xhsp(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(xhsp(&["bench", "--group", "p=7,k=1,exp=p", "--path", "theorem3"]).status.code(), Some(2));
}

#[test]
fn forced_triples_on_small_prime_fail_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let planted = dir.path().join("h.json");
    std::fs::write(&planted, "[[1,0,0]]").unwrap();
    let o = xhsp(&["solve", "--group", "p=5,k=1,exp=p", "--trials", "3", "--path", "theorem3", "--planted", planted.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    for t in r["trials"].as_array().unwrap() {
        assert_eq!(t["success"], false);
        assert!(t["error"].as_str().unwrap().contains('5'));
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["relations", "lemma4", "lemma6", "fact1"] {
        let o = xhsp(&["verify", suite, "--trials", "2"]);
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(o.status.success(), "{suite}: {text}");
        assert!(text.contains("0 failed"));
    }
    let o = xhsp(&["verify", "lemma6"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("good_fraction(11) = "));
}

#[test]
fn bench_reports_iteration_means() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    let o = xhsp(&["bench", "--group", "p=11,k=1,exp=p", "--trials", "40", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["pass"], true);
    assert!((r["triple_rounds"]["expected_at_most"].as_f64().unwrap() - 11.0).abs() < 1e-12);
    assert!(r["witness_rate"]["rate"].as_f64().unwrap() >= 0.0909);
}
