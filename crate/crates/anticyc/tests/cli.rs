use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const TOY_WEIGHT: &str = r#"{"n":1,"mu":[2,-2],"lambda":[0]}"#;

fn run(args: &[&str]) -> (i32, Value, Vec<u8>) {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_anticyc")).args(args).output().expect("binary runs");
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().expect("exit code"), report, out.stdout)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("anticyc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn crit_example() {
    let (code, report, _) = run(&["crit", "--weight", r#"{"n":1,"mu":[0,-5],"lambda":[0]}"#]);
    assert_eq!(code, 0);
    assert_eq!(report, serde_json::json!({ "crit": [0, 5], "h": 5 }));
}

#[test]
fn branch_check_reports_multiplicity_one() {
    let (code, report, _) = run(&["branch-check", "--weight", r#"{"n":2,"mu":[2,1,-1],"lambda":[1,0]}"#]);
    assert_eq!(code, 0);
    assert_eq!(report["invariant_dimension"], 1);
    assert_eq!(report["product_matches_direct"], true);
}

#[test]
fn exit_codes_distinguish_schema_and_precondition() {
    let (code, _, _) = run(&["crit", "--weight", r#"{"n":1,"mu":[0]}"#]);
    assert_eq!(code, 4);
    let (code, _, _) = run(&["up-matrix", "/nonexistent/model.json", "--weight", TOY_WEIGHT, "--trunc", "0,1"]);
    assert_eq!(code, 2);
    let (code, report, _) = run(&["lp-build", "--model", "bundled:n1-p3-one-class", "--weight", r#"{"n":1,"mu":[0,0],"lambda":[0]}"#, "--slope", "1", "--out", scratch("never.bin").to_str().unwrap()]);
    assert_eq!(code, 2, "{report}");
}

#[test]
fn lp_build_and_eval_round_trip() {
    let l = scratch("L.bin");
    let (code, report, first) = run(&["lp-build", "--model", "bundled:n1-p3-one-class", "--weight", TOY_WEIGHT, "--slope", "1", "--beta", "2", "--out", l.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["growth"]["certified"], true);
    let (_, _, second) = run(&["lp-build", "--model", "bundled:n1-p3-one-class", "--weight", TOY_WEIGHT, "--slope", "1", "--beta", "2", "--out", l.to_str().unwrap()]);
    assert_eq!(first, second, "reports are deterministic");
    let (code, report, _) = run(&["lp-eval", "--L", l.to_str().unwrap(), "--char", r#"{"j":0,"beta":1,"gen_exponent":1}"#]);
    assert_eq!(code, 0);
    assert_eq!(report["accessible"], true);
    let (code, report, _) = run(&["lp-eval", "--L", l.to_str().unwrap(), "--char", r#"{"j":5,"beta":0,"gen_exponent":0}"#]);
    assert_eq!(code, 0);
    assert_eq!(report["tag"], "no interpolation semantics");
}

#[test]
fn kappa_of_a_dirac() {
    let d = scratch("dirac.bin");
    let k = scratch("kappa.bin");
    assert_eq!(run(&["dirac", "--n", "1", "--level", "1", "--point", "1", "--out", d.to_str().unwrap()]).0, 0);
    let (code, report, _) = run(&["kappa", "--dist", d.to_str().unwrap(), "--weight", TOY_WEIGHT, "--out", k.to_str().unwrap()]);
    assert_eq!(code, 0, "{report}");
    std::fs::write(&d, b"not a table").unwrap();
    assert_eq!(run(&["kappa", "--dist", d.to_str().unwrap(), "--weight", TOY_WEIGHT, "--out", k.to_str().unwrap()]).0, 4);
}

#[test]
fn family_lift_and_evaluation() {
    let f = scratch("family.bin");
    let (code, report, _) = run(&["family-lift", "--model", "bundled:n1-p3-two-class", "--weight", TOY_WEIGHT, "--slope", "0", "--out", f.to_str().unwrap()]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["certified"], true);
    let (code, report, _) = run(&["family-eval", "--family", f.to_str().unwrap(), "--point", "0"]);
    assert_eq!(code, 0);
    assert_eq!(report["classical"], true);
    assert_eq!(report["precision"], 8);
    let (code, _, _) = run(&["family-eval", "--family", f.to_str().unwrap(), "--point", "1"]);
    assert_eq!(code, 2);
    let (code, report, _) = run(&["family-eval", "--family", f.to_str().unwrap(), "--point", "9", "--model", "bundled:n1-p3-two-class", "--char", r#"{"j":0,"beta":1,"gen_exponent":1}"#]);
    assert_eq!(code, 0, "{report}");
    assert!(report["value"].is_object());
}

#[test]
fn verify_all_reports_every_criterion() {
    let (code, report, first) = run(&["verify-all", "--profile", "n1-p3"]);
    let criteria = report["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 12);
    let failing: Vec<u64> = criteria.iter().filter(|c| c["passed"] == false).map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(code, if failing.is_empty() { 0 } else { 3 });
    let (_, _, second) = run(&["verify-all", "--profile", "n1-p3"]);
    assert_eq!(first, second);
    assert_eq!(run(&["verify-all", "--profile", "nope"]).0, 2);
}
