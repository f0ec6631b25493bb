//! The `gfl` binary: subcommands, output formats and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn gfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfl")).args(args).env("GFL_THREADS", "2").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

const SMALL: [&str; 8] = ["--field", "2,1", "--field", "3,1", "--dmax", "3", "--smax", "4"];

#[test]
fn verify_theorem_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theorem.json");
    let mut args = vec!["verify-theorem"];
    args.extend(SMALL);
    args.extend(["--out", path.to_str().unwrap()]);
    let out = gfl(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let first = std::fs::read(&path).unwrap();
    let report: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["summary"]["falsified"], 0);
    let cell = report["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["q"] == 2 && c["d"] == 3 && c["seq"] == serde_json::json!([4, 2]))
        .expect("cell (4,2)");
    assert_eq!(cell["rank"], 21);
    assert_eq!(cell["status"], "verified");

    let again = gfl(&args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn csv_and_table_formats() {
    let mut args = vec!["verify-theorem", "--format", "csv"];
    args.extend(SMALL);
    let out = gfl(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "q,d,seq,strict,degree,flag_dim,gamma_dim,rank,injective,criterion_holds,psi_rank,key_step,status"
    );
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 13));

    let out = gfl(&["tightness", "--format", "table", "--field", "2", "--dmax", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("sharpness violations 0"));
}

#[test]
fn other_modes_succeed() {
    for mode in ["lemmas", "stabilize", "ring-of-lines"] {
        let out = gfl(&[mode, "--field", "2", "--field", "3", "--dmax", "2", "--smax", "3", "--degmax", "8"]);
        assert_eq!(out.status.code(), Some(0), "{mode}: {}", String::from_utf8_lossy(&out.stderr));
        let report = json(&out);
        assert!(report.is_object(), "{mode}");
    }
}

#[test]
fn phi_matrix_emission() {
    let out = gfl(&["phi", "--emit-matrix", "--field", "2,1", "--d", "3", "--seq", "4,2", "--packed"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&out);
    assert_eq!(m["degree"], 18);
    assert_eq!(m["d"], 3);
    let text = serde_json::to_string(&m).unwrap();
    assert!(text.contains("190") && text.contains("21"));

    let out = gfl(&["phi", "--emit-matrix", "--field", "3", "--d", "2", "--line", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["degree"], 2);
}

#[test]
fn flag_listing() {
    let out = gfl(&["flags", "--list", "--field", "2,1", "--d", "3", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 21);
    assert_eq!(v["flags"].as_array().unwrap().len(), 21);
    let out = gfl(&["flags", "--list", "--field", "3", "--d", "2", "--r", "1", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 7] = [
        &["verify-theorem", "--field", "6"],
        &["verify-theorem", "--field", "2,2,1,0,1"],
        &["verify-theorem", "--format", "xml"],
        &["verify-theorem", "--dmax", "0"],
        &["no-such-command"],
        &["phi", "--emit-matrix", "--d", "2"],
        &["phi", "--emit-matrix", "--field", "3", "--d", "2", "--line", "3"],
    ];
    for args in cases {
        let out = gfl(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_gfl"))
        .args(["lemmas", "--dmax", "1"])
        .env("GFL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
