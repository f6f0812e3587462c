use std::process::{Command, Output};

use serde_json::Value;

fn lieherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lieherm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON error object")
}

#[test]
fn catalog_lists_four_families() {
    let out = lieherm(&["catalog", "--json"]);
    assert!(out.status.success());
    let js = json_of(&out);
    let names: Vec<&str> = js
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["abelian", "rr30", "r2prime", "dS"]);
    let text = lieherm(&["catalog"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("r2prime"));
}

#[test]
fn catalog_instantiates_ds() {
    let out = lieherm(&["catalog", "--name", "dS", "--lambda", "1", "--json"]);
    assert!(out.status.success());
    let brackets = &json_of(&out)["algebra"]["brackets"];
    // [e1,e2] = e2 - e3 at lambda = 1
    let has = |i: u64, j: u64, k: u64, v: &str| {
        brackets
            .as_array()
            .unwrap()
            .iter()
            .any(|b| b["i"] == i && b["j"] == j && b["k"] == k && b["value"] == v)
    };
    assert!(has(1, 2, 2, "1") && has(1, 2, 3, "-1") && has(1, 4, 4, "2") && has(2, 3, 4, "-1"));
}

#[test]
fn catalog_ds_without_lambda_is_a_usage_error() {
    let out = lieherm(&["catalog", "--name", "dS"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "usage");
}

#[test]
fn abelian_identity_is_flat() {
    let out = lieherm(&["curvature", "--name", "abelian", "--json"]);
    assert!(out.status.success());
    let js = json_of(&out);
    assert_eq!(js["flags"]["flat"], true);
    assert_eq!(js["scalar"], "0");
}

#[test]
fn ds_k2_has_vanishing_wplus() {
    let out = lieherm(&["curvature", "--name", "dS", "--lambda", "1", "--k", "2", "--json"]);
    assert!(out.status.success());
    let js = json_of(&out);
    assert_eq!(js["flags"]["wplus_zero"], true);
    assert_eq!(js["flags"]["wminus_zero"], false);
}

#[test]
fn r2prime_relations_give_conformally_flat_negative_scalar() {
    let out = lieherm(&[
        "curvature",
        "--name",
        "r2prime",
        "--a1",
        "1",
        "--a2",
        "2",
        "--a3",
        "3",
        "--a4",
        "1/2",
        "--a5",
        "-1",
        "--a6",
        "2",
        "--json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let js = json_of(&out);
    assert_eq!(js["flags"]["conformally_flat"], true);
    assert!(js["scalar"].as_str().unwrap().starts_with('-'));
}

#[test]
fn invalid_inputs_exit_two_with_error_object() {
    let out = lieherm(&["curvature", "--name", "abelian", "--diag", "1,1,-1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "not_positive_definite");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // [e1,e2] = e2, [e1,e3] = e4, [e3,e4] = e1 violates Jacobi
    std::fs::write(
        &path,
        r#"{"dim": 4, "brackets": [{"i":1,"j":2,"k":2,"value":"1"},{"i":1,"j":3,"k":4,"value":"1"},{"i":3,"j":4,"k":1,"value":"1"}]}"#,
    )
    .unwrap();
    let out = lieherm(&["curvature", "--algebra", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "jacobi");
}

#[test]
fn decimals_need_float_mode() {
    let out = lieherm(&["curvature", "--name", "dS", "--lambda", "0.5", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lieherm(&[
        "--mode",
        "float",
        "curvature",
        "--name",
        "dS",
        "--lambda",
        "0.5",
        "--k",
        "2",
        "--json",
    ]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["flags"]["wplus_zero"], true);
}

#[test]
fn verify_main_theorem_passes_in_order() {
    let out = lieherm(&["verify", "main-theorem", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let js = json_of(&out);
    assert_eq!(js["status"], "pass");
    let subs: Vec<&str> = js["sub_reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["claim"].as_str().unwrap())
        .collect();
    assert_eq!(subs, ["dS-kahler", "abelian-rr30", "r2prime-ak"]);
}

#[test]
fn verify_r2prime_ak_reports_h_list() {
    let out = lieherm(&["verify", "r2prime-ak", "--a1", "1", "--t", "1/2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let h = &json_of(&out)["evidence"]["structures"][0]["H"];
    assert_eq!(h, &serde_json::json!(["-1", "-1/2", "-17/25", "-41/50"]));
}

#[test]
fn unknown_claim_exits_two() {
    let out = lieherm(&["verify", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["error"]["message"].as_str().unwrap().contains("bogus"));
}

#[test]
fn failing_verification_exits_one() {
    let out = lieherm(&["verify", "main-theorem", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = lieherm(&["verify", "dS-kahler", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 2);
}

#[test]
fn scan_ds_counts_self_dual_metrics() {
    let out = lieherm(&["scan", "dS", "--samples", "20", "--seed", "7", "--json"]);
    assert!(out.status.success());
    let c = &json_of(&out)["counts"];
    assert_eq!(c["metrics"], 20);
    assert_eq!(c["wplus_zero"], 20);
}

#[test]
fn scan_r2prime_finds_non_constant_h() {
    let out = lieherm(&["scan", "r2prime", "--samples", "10", "--seed", "1", "--json"]);
    let c = &json_of(&out)["counts"];
    assert_eq!(c["almost_kahler"], 10);
    assert_eq!(c["non_constant_h"], 10);
}

#[test]
fn scan_abelian_is_flat_with_zero_h() {
    let out = lieherm(&["scan", "abelian", "--json"]);
    let js = json_of(&out);
    assert_eq!(js["counts"]["flat"], js["counts"]["metrics"]);
    for e in js["entries"].as_array().unwrap() {
        for s in e["structures"].as_array().unwrap() {
            assert_eq!(
                s["constant_h"],
                serde_json::json!({ "verdict": "constant", "kappa": "0" })
            );
        }
    }
}

#[test]
fn structure_file_adds_hermitian_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(
        &path,
        r#"{"gram": [["4","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]], "orientation": 1, "omega": {"14": "-2", "23": "1"}}"#,
    )
    .unwrap();
    let out = lieherm(&[
        "curvature",
        "--name",
        "dS",
        "--lambda",
        "1",
        "--structure",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = &json_of(&out)["structure"];
    assert_eq!(s["integrable"], true);
    assert_eq!(s["almost_kahler"], true);
    assert_eq!(s["constant_h"]["verdict"], "constant");
}
