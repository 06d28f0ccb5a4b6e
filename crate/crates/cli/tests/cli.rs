use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn arakelov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arakelov")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn w1() -> String {
    scenario("w1.json").display().to_string()
}

#[test]
fn classify_w1() {
    let out = arakelov(&["classify", "--scenario", &w1()]);
    assert!(out.status.success());
    let v = json(&out);
    let o = &v["outputs"];
    assert_eq!(o["big"], false);
    assert_eq!(o["pseudo_effective"], true);
    assert_eq!(o["effective"], true);
    assert_eq!(o["lambda_ess"], "0");
    assert_eq!(o["mu_inf"], "1/2");
    assert_eq!(v["command"], "classify");
    assert_eq!(v["input_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn classify_canonical() {
    let path = scenario("canonical.json").display().to_string();
    let v = json(&arakelov(&["classify", "--scenario", &path]));
    let o = &v["outputs"];
    assert_eq!(o["big"], false);
    assert_eq!(o["pseudo_effective"], true);
    assert_eq!(o["effective"], true);
}

#[test]
fn volumes_w1() {
    let v = json(&arakelov(&["volumes", "--scenario", &w1()]));
    assert_eq!(v["outputs"]["vol_chi"], "-1/4");
    assert_eq!(v["outputs"]["vol"], "0");
}

#[test]
fn pair_examples() {
    let v = json(&arakelov(&["pair", "--scenario", &w1()]));
    assert_eq!(v["outputs"]["pairing"], "-1/4");
    let path = scenario("canonical.json").display().to_string();
    let v = json(&arakelov(&["pair", "--scenario", &path]));
    assert_eq!(v["outputs"]["pairing"], "0");
    // W1 against (D', base 1/3) with D' = 2·pinf: base·deg terms plus the
    // energy cross term, which vanishes because the second φ is 0
    let path = scenario("pair.json").display().to_string();
    let v = json(&arakelov(&["pair", "--scenario", &path]));
    assert_eq!(v["outputs"]["pairing"], "1/3");
}

#[test]
fn hs_converge_w1() {
    let out = arakelov(&["hs-converge", "--scenario", &w1(), "--n", "10,50,100"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["outputs"]["final_gap"], "1/200");
    let rows = v["outputs"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["ratio"], "-51/200");

    let csv = arakelov(&["hs-converge", "--scenario", &w1(), "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("n,deg,deg_plus,ratio,target,gap\n"));
    assert!(text.trim_end().ends_with(",1/200"));
}

#[test]
fn dgt_profile_csv() {
    let out = arakelov(&["dgt-profile", "--scenario", &w1(), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t_lo,t_hi,deg_value\n"));
}

#[test]
fn check_inequalities_runs_clean() {
    let out = arakelov(&["check-inequalities", "--seed", "7", "--trials", "1000"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["outputs"]["trials"], 1000);
    assert_eq!(v["outputs"]["violation_count"], 0);
}

#[test]
fn output_is_deterministic() {
    let a = arakelov(&["classify", "--scenario", &w1()]);
    let b = arakelov(&["classify", "--scenario", &w1()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn writes_into_out_dir() {
    let dir = std::env::temp_dir().join(format!("arakelov-cli-{}", std::process::id()));
    let out = arakelov(&["volumes", "--scenario", &w1(), "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("volumes.json")).unwrap();
    assert!(text.contains("\"vol_chi\": \"-1/4\""));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("arakelov-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    let text = std::fs::read_to_string(scenario("w1.json")).unwrap().replace("\"-1/2\"", "\"3/0\"");
    std::fs::write(&bad, text).unwrap();
    let out = arakelov(&["classify", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "input");

    // negative degree: Γ(D) is empty
    let neg = dir.join("neg.json");
    let text = std::fs::read_to_string(scenario("w1.json"))
        .unwrap()
        .replace("{ \"point\": \"pinf\", \"mu\": \"1\" }", "{ \"point\": \"pinf\", \"mu\": \"-1\" }");
    std::fs::write(&neg, text).unwrap();
    let out = arakelov(&["dgt-profile", "--scenario", neg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let out = arakelov(&["volumes"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(dir).ok();
}
