use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spherical-reals"));
    cmd.env_remove("SPHERICAL_REALS_PRECISION");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn value<'a>(payload: &'a Value, quantity: &str) -> &'a str {
    payload["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["quantity"] == quantity)
        .and_then(|r| r["value"].as_str())
        .unwrap_or_else(|| panic!("no row {quantity}"))
}

#[test]
fn pi_over_four_to_fifty_digits() {
    let p = json(&["exact", "--n", "2", "--m", "2", "--digits", "50"]);
    assert_eq!(
        value(&p, "p"),
        "7.8539816339744830961566084581987572104929234984378e-1"
    );
    assert_eq!(value(&p, "p_symbolic"), "1/4*pi^1");
}

#[test]
fn payload_fields() {
    let p = json(&["mc", "--n", "4", "--trials", "200", "--seed", "9"]);
    assert_eq!(p["schema_version"], 1);
    assert_eq!(p["inputs"]["mc"]["seed"], 9);
    let prov = &p["provenance"];
    assert_eq!(prov["seed"], 9);
    assert_eq!(prov["precision_bits"], 256);
    assert_eq!(prov["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(prov["tol"].is_string());
    for row in p["results"].as_array().unwrap() {
        assert!(row["value"].is_string(), "numbers are emitted as strings");
    }
}

#[test]
fn precision_from_environment() {
    let out = bin()
        .env("SPHERICAL_REALS_PRECISION", "80")
        .args(["exact", "--n", "2", "--m", "0"])
        .output()
        .unwrap();
    let p: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(p["provenance"]["precision_bits"], 80);
    let flag = json(&["--precision", "96", "exact", "--n", "2", "--m", "0"]);
    assert_eq!(flag["provenance"]["precision_bits"], 96);
}

#[test]
fn csv_matches_json() {
    let args = ["idp", "--x-grid", "0.5,4,4"];
    let p = json(&args);
    let out = run(&[&["--format", "csv"], &args[..]].concat());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,param,at,value\n"));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let csv_rows: Vec<Vec<String>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .filter(|r: &Vec<String>| r[0] != "provenance")
        .collect();
    let json_rows: Vec<Vec<String>> = p["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            ["quantity", "param", "at", "value"]
                .iter()
                .map(|k| r[*k].as_str().unwrap().to_string())
                .collect()
        })
        .collect();
    assert_eq!(csv_rows, json_rows);
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let out = run(&["--output", path.to_str().unwrap(), "exact", "--n", "6"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let p: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let ms: Vec<&str> = p["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["quantity"] == "p")
        .map(|r| r["at"].as_str().unwrap())
        .collect();
    assert_eq!(ms, ["M=0", "M=2", "M=4", "M=6"]);
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &["moments", "--n", "20", "--verify"],
        &["ldp", "--alpha", "0.5", "--n", "60"],
        &["idp", "--x", "4"],
        &["clt", "--n", "100", "--exact-mean"],
        &["asym", "--n", "60", "--exact"],
        &["propcheck", "--n", "40,80"],
        &["compare", "--mode", "overlay", "--n", "40"],
        &["compare", "--mode", "mc", "--n", "6", "--trials", "500"],
    ];
    for args in cases {
        let p = json(args);
        assert!(!p["results"].as_array().unwrap().is_empty(), "{args:?}");
    }
    let moments = json(&["moments", "--n", "20", "--verify"]);
    assert_eq!(value(&moments, "table_check"), "exact");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["exact", "--n", "7"]), Some(2));
    assert_eq!(code(&["exact", "--n", "8", "--m", "3"]), Some(2));
    assert_eq!(code(&["ldp", "--alpha", "-0.1"]), Some(2));
    assert_eq!(code(&["--precision", "10", "exact", "--n", "2"]), Some(2));
    assert_eq!(code(&["--tol", "1e-300", "idp", "--x", "2"]), Some(3));
    assert_eq!(
        code(&["--output", "/nonexistent/dir/out.json", "exact", "--n", "2"]),
        Some(1)
    );
}
