//! The binary's process interface: flags, exit codes and file formats.

use std::path::Path;
use std::process::{Command, Output};

fn ffa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffanalytica")).args(args).output().expect("binary runs")
}

fn ffa_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffanalytica")).args(args).env(key, val).output().expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut out = vec![r.headers().unwrap().iter().map(String::from).collect()];
    out.extend(r.records().map(|x| x.unwrap().iter().map(String::from).collect()));
    out
}

#[test]
fn primes_match_gauss_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("primes.csv");
    let o = ffa(&["primes", "--q", "3", "--max-d", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["d", "enumerated", "gauss", "match"]);
    assert_eq!(rows.len(), 11);
    assert!(rows[1..].iter().all(|r| r[3] == "true"));
    // |P_10| over F_3
    assert_eq!(rows[10][2], "5880");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("primes.csv.schema.json")).unwrap()).unwrap();
    assert_eq!(schema["columns"].as_array().unwrap().len(), 4);
    assert!(schema.get("runtime_s").is_none());
}

#[test]
fn lfun_json_reports_rh() {
    let o = ffa(&["lfun", "--q", "2", "--cond-max", "4", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let recs = v["records"].as_array().unwrap();
    assert!(!recs.is_empty());
    assert!(recs.iter().all(|r| r["rh_ok"] == true));
    assert!(v["runtime_s"].as_f64().is_some());
}

#[test]
fn chowla_csv_per_degree() {
    let o = ffa(&["chowla", "--q", "2", "--B", "1", "--N", "12", "--threads", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,value_re,value_im,abs");
    assert_eq!(lines.len(), 13);
    let again = ffa(&["chowla", "--q", "2", "--B", "1", "--N", "12", "--threads", "3"]);
    assert_eq!(text.as_bytes(), &again.stdout[..]);
}

#[test]
fn exit_codes() {
    assert_eq!(ffa(&["field", "--q", "6"]).status.code(), Some(2));
    assert_eq!(ffa(&["mr-variance", "--N", "4", "--H", "5"]).status.code(), Some(2));
    assert_eq!(ffa(&["distance", "--N", "6", "--fn", "bogus"]).status.code(), Some(2));
    assert_eq!(ffa_env(&["chowla", "--N", "24"], "FFA_BUDGET_MB", "1").status.code(), Some(3));
    assert_eq!(ffa_env(&["field"], "FFA_BUDGET_MB", "lots").status.code(), Some(2));
}

#[test]
fn every_subcommand_runs_small() {
    let cases: &[&[&str]] = &[
        &["field", "--q", "4"],
        &["chars", "--q", "3", "--Q", "t^2", "--nu", "1"],
        &["distance", "--N", "8", "--fn", "e:1/4"],
        &["best-char", "--N", "8", "--Q", "t^2+t+1"],
        &["mr-variance", "--N", "8", "--H", "2,4", "--mode", "chi1-star"],
        &["ap-variance", "--N", "8", "--Q", "t^2"],
        &["katai", "--N", "8", "--fn", "crandom:1", "--z", "1/3"],
        &["expsum", "--N", "8", "--H", "3", "--arc-depth", "2"],
        &["energy", "--H", "2,3,4"],
        &["smooth", "--N", "8"],
        &["profile", "--N", "8", "--H", "2", "--W", "1", "--nu", "1"],
    ];
    for args in cases {
        let o = ffa(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn best_char_finds_a_twisted_pretender() {
    let spec = r#"twist(one,chi={"modulus":"t^2+t+1","exponents":[1],"nu":0},theta=0.2)"#;
    let o = ffa(&["best-char", "--N", "9", "--Q", "t^2+t+1", "--fn", spec, "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let best = &v["values"]["best"];
    assert_eq!(best["character"]["exponents"], serde_json::json!([1]));
    assert!((best["theta"].as_f64().unwrap() - 0.2).abs() < 1e-8);
}
