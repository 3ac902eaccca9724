//! End-to-end CLI checks: exit codes, JSON envelope, file round trips.

use std::process::Command;

use serde_json::Value;

fn nilres() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nilres"))
}

fn run_json(args: &[&str]) -> (Value, i32) {
    let out = nilres().args(args).output().expect("spawn nilres");
    let code = out.status.code().unwrap_or(-1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let v: Value = serde_json::from_str(stdout.trim())
        .unwrap_or_else(|e| panic!("bad JSON ({e}) from {args:?}: {stdout}"));
    (v, code)
}

#[test]
fn witness_heisenberg_x3_at_2() {
    let (v, code) = run_json(&[
        "witness",
        "--group",
        "catalog:heisenberg",
        "--element",
        "x3",
        "--prime",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["order"], "8");
    assert_eq!(v["results"]["exact"], true);
    assert_eq!(v["results"]["oracle_checked"], true);
    assert_eq!(v["results"]["certificate"]["kernel"]["index"], "8");
    for key in ["tool_version", "group", "command", "params", "results", "warnings"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn depth_of_collapsing_power() {
    // 210 = 2·3·5·7 but 4 does not divide it: Z/4 separates
    let (v, code) = run_json(&[
        "depth",
        "--group",
        "catalog:abelian(2)",
        "--element",
        "x1^210",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["depth"], "4");
    assert_eq!(v["results"]["prime"], "2");
}

#[test]
fn verify_s3_passes_and_falsify_exits_zero() {
    let (v, code) = run_json(&["verify-s3", "--prime", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["all_pass"], true);
    assert_eq!(v["results"]["published_center_cyclic_claim"], false);
    assert!(!v["warnings"].as_array().unwrap().is_empty());

    let (v, code) = run_json(&["falsify-p31", "--prime", "13"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["falsified"], true);
}

#[test]
fn usage_errors_exit_one() {
    let out = nilres()
        .args(["depth", "--group", "catalog:heisenberg", "--element", "zz^2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = nilres()
        .args(["verify-s3", "--prime", "7"]) // 7 = 3 mod 4: no roots
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn file_group_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("heis.pc");
    std::fs::write(&path, "group heis\ngen a b c\nrel [a,b] = c\n").unwrap();
    let (v, code) = run_json(&[
        "normal-form",
        "--group",
        path.to_str().unwrap(),
        "--element",
        "b a",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["group"], "heis");
    assert_eq!(v["results"]["normal_form"], "a b c^-1");

    // catalog prints a file that parses back to the same group
    let (v, _) = run_json(&["catalog", "--name", "counterexample_g"]);
    let text = v["results"]["file"].as_str().unwrap();
    let path2 = dir.path().join("g.pc");
    std::fs::write(&path2, text).unwrap();
    let (v2, code) = run_json(&[
        "normal-form",
        "--group",
        path2.to_str().unwrap(),
        "--element",
        "w x",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v2["results"]["normal_form"], "x w u^-1");
}

#[test]
fn rp_sets_deterministic_across_threads() {
    let mut outputs = Vec::new();
    for t in ["1", "4"] {
        let (v, code) = run_json(&[
            "rp-sets",
            "--group",
            "catalog:heisenberg",
            "--element",
            "x3",
            "--max-prime",
            "40",
            "--threads",
            t,
        ]);
        assert_eq!(code, 0);
        outputs.push(v["results"].clone());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0]["buckets"]["3"].as_array().unwrap().len(), 12);
}
