use std::process::Command;

use pintersect_core::cli::{dispatch, parse_frequency, parse_set};
use pintersect_core::fourier::{Frequency, GaussValue};
use pintersect_core::intersective::{AuxData, IntersectivityVerdict};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pintersect").chain(args.iter().copied());
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn certify_example() {
    let (code, out, _) = run(&["certify", "--poly", r#"["0","-1","1"]"#, "--qmax", "1000"]);
    assert_eq!(code, 0);
    let v: IntersectivityVerdict = serde_json::from_str(&out).unwrap();
    assert!(matches!(v, IntersectivityVerdict::SufficientCondition { .. }));
}

#[test]
fn gauss_example_is_byte_exact() {
    let (code, out, _) = run(&["gauss", "--poly", r#"["-1","0","1"]"#, "--d", "1", "--q", "3", "--a", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), r#"{"re":2.0,"im":0.0}"#);
}

#[test]
fn gauss_all_a_round_trips() {
    let (code, out, _) = run(&["gauss", "--poly", r#"["-1","0","1"]"#, "--q", "7", "--all-a"]);
    assert_eq!(code, 0);
    let rows: Vec<GaussValue> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(serde_json::to_string(&rows).unwrap(), out.trim());
}

#[test]
fn aux_round_trips() {
    let (code, out, _) = run(&["aux", "--poly", r#"["-1","0","1"]"#, "--d", "5"]);
    assert_eq!(code, 0);
    let aux: AuxData = serde_json::from_str(&out).unwrap();
    assert_eq!(aux.d, 5);
    assert_eq!(serde_json::to_string(&aux).unwrap(), out.trim());
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(run(&["gauss", "--d", "1", "--q", "3", "--a", "1"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["certify", "--poly", r#"["-1","0","1"]"#, "--bogus"]).0, 2);
    // x^2 has no unit root mod 2, so its auxiliary data do not exist.
    let (code, _, err) = run(&["aux", "--poly", r#"["0","0","1"]"#, "--d", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
    assert_eq!(run(&["gauss", "--poly", r#"["-1","0","1"]"#, "--q", "4", "--a", "2"]).0, 1);
}

#[test]
fn psi_prints_a_decimal() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pintersect"))
        .args(["psi", "--x", "20", "--a", "1", "--q", "4"])
        .env("PINTERSECT_CACHE", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 7.0076).abs() < 1e-4);
}

#[test]
fn binary_exit_codes() {
    let out = Command::new(env!("CARGO_BIN_EXE_pintersect"))
        .args(["gauss", "--q", "3", "--a", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn iterate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("set.json");
    let members: Vec<u64> = (6..=3000).step_by(6).collect();
    std::fs::write(&set, serde_json::json!({ "L": 3000, "members": members }).to_string()).unwrap();
    let args = ["iterate", "--poly", r#"["0","-1","1"]"#, "--set", set.to_str().unwrap(), "--budget", "auto"];
    let (c1, o1, _) = run(&args);
    let (c2, o2, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(o1, o2);
    let v: serde_json::Value = serde_json::from_str(&o1).unwrap();
    assert_eq!(v["outcome"], "StructureFound");
    assert!(v["steps"].is_array());
}

#[test]
fn count_both_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("set.json");
    std::fs::write(&set, "[1, 4, 9, 12]").unwrap();
    let mut values = Vec::new();
    for method in ["fft", "direct"] {
        let (code, out, _) = run(&[
            "count", "--poly", r#"["-1","0","1"]"#, "--set", set.to_str().unwrap(), "--method", method,
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        values.push(v["R"].as_f64().unwrap());
    }
    assert!((values[0] - values[1]).abs() < 1e-9);
}

#[test]
fn config_file_supplies_the_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "# x^2 - 1\npoly = [\"-1\", \"0\", \"1\"]\nc2 = 0.02\n").unwrap();
    let (code, out, _) = run(&["--config", cfg.to_str().unwrap(), "gauss", "--q", "3", "--a", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), r#"{"re":2.0,"im":0.0}"#);
}

#[test]
fn profile_csv_header() {
    let (code, out, _) = run(&["profile", "--poly", r#"["0","-1","1"]"#, "--ns", "50,100", "--csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("N,density,set_size,mode,poly"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn weyl_moment_and_arcs() {
    let (code, out, _) = run(&["weyl", "--poly", r#"["-1","0","1"]"#, "--L", "20000", "--alpha", "0", "--moment", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["parseval_lhs"].as_f64().unwrap() - v["parseval_rhs"].as_f64().unwrap()).abs() < 1e-12);

    let (code, out, _) = run(&["weyl", "--poly", r#"["-1","0","1"]"#, "--L", "20000", "--alpha", "0.123"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["residual"].is_null() && v["ratio"].as_f64().unwrap() < 1.0);

    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("set.json");
    let members: Vec<u64> = (3..=900).step_by(3).collect();
    std::fs::write(&set, serde_json::json!({ "L": 900, "members": members }).to_string()).unwrap();
    let (code, out, _) = run(&["arcs", "--set", set.to_str().unwrap(), "--eta", "0.3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["argmax"][0], 3);
    assert_eq!(run(&["arcs", "--set", set.to_str().unwrap(), "--eta", "0.3", "--grid", "100"]).0, 1);
}

#[test]
fn helpers_parse() {
    assert_eq!(parse_frequency("2/7").unwrap(), Frequency::rational(2, 7));
    assert_eq!(parse_frequency("0.25").unwrap(), Frequency::Real(0.25));
    assert!(parse_frequency("1/0").is_err() && parse_frequency("x").is_err());
    assert_eq!(parse_set(r#"{"L": 10, "members": [3, 1]}"#).unwrap().members(), &[1, 3]);
    assert!(parse_set(r#"{"L": 2, "members": [3]}"#).is_err());
}
