use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stable-stats"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn exact_values(doc: &Value) -> Vec<(String, String)> {
    doc["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let v = &r["value"];
            (v["num"].as_str().unwrap().to_string(), v["den"].as_str().unwrap().to_string())
        })
        .collect()
}

#[test]
fn expect_fixed_lines() {
    let doc = json(&["expect", "--family", "gl", "--q", "2", "--class", "eig:1", "--n", "3", "--mode", "exact"]);
    assert_eq!(exact_values(&doc), vec![("1".into(), "1".into())]);
    let r = &doc["results"][0];
    assert_eq!(r["n"], 3);
    assert_eq!(r["mode"], "exact");
    assert_eq!(r["factors"], serde_json::json!(["invfac:[x+1]"]));
    assert_eq!(doc["config"]["family"], "gl");
}

#[test]
fn scan_transpositions() {
    let doc = json(&["scan", "--family", "sym", "--class", "cycletype:[2]", "--n", "2..6"]);
    let values = exact_values(&doc);
    assert_eq!(values.len(), 5);
    assert!(values.iter().all(|v| v == &("1".to_string(), "2".to_string())));
    assert_eq!(doc["verdict"], "stable");
}

#[test]
fn scan_product_over_f2() {
    let doc = json(&["scan", "--family", "gl", "--q", "2", "--class", "eig:1", "--class", "eig:1", "--n", "2..4"]);
    assert!(exact_values(&doc).iter().all(|v| v == &("2".to_string(), "1".to_string())));
    assert_eq!(doc["verdict"], "stable");
    assert_eq!(doc["results"][0]["factors"], serde_json::json!(["invfac:[x+1]", "invfac:[x+1]"]));
}

#[test]
fn expand_repeated_eigenvalue() {
    let doc = json(&["expand", "--family", "gl", "--q", "2", "--lhs", "eig:1", "--rhs", "eig:1"]);
    let terms = doc["terms"].as_array().unwrap();
    let coefficients: Vec<(&str, &str, &str)> = terms
        .iter()
        .map(|t| {
            (
                t["label"].as_str().unwrap(),
                t["numerator"].as_str().unwrap(),
                t["denominator"].as_str().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        coefficients,
        vec![("invfac:[x+1]", "1", "1"), ("invfac:[x+1, x+1]", "6", "1")]
    );
}

#[test]
fn monte_carlo_is_deterministic_across_thread_counts() {
    let args = [
        "moment", "--family", "gl", "--q", "2", "--class", "eig:1", "--n", "5", "--mode", "mc", "--samples", "3000",
        "--seed", "11",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_stable-stats"))
        .args(args)
        .env("STABLE_STATS_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_stable-stats"))
        .args(args)
        .env("STABLE_STATS_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let doc: Value = serde_json::from_slice(&one.stdout).unwrap();
    let v = &doc["results"][0]["value"];
    assert_eq!(v["samples"], 3000);
    assert!(v["stderr"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["verdict"], "n/a");
}

#[test]
fn csv_output() {
    let out = run(&["classes", "--family", "sym", "--d", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["label", "size", "representative"]);
    let rows: Vec<(String, String)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect();
    let expected = [("cycletype:[1,1,1]", "1"), ("cycletype:[2,1]", "3"), ("cycletype:[3]", "2")];
    assert_eq!(rows, expected.map(|(l, s)| (l.to_string(), s.to_string())));
}

#[test]
fn extension_field_with_modulus() {
    let doc = json(&["expect", "--family", "gl", "--q", "4", "--modulus", "g^2+g+1", "--class", "eig:g", "--n", "2"]);
    assert_eq!(exact_values(&doc), vec![("1".into(), "3".into())]);
}

#[test]
fn usage_errors_exit_2() {
    let parse = run(&["expect", "--family", "gl", "--q", "2", "--class", "invfac:[x^2+*]", "--n", "2"]);
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("column 13"));

    let cap = run(&["expect", "--family", "gl", "--q", "2", "--class", "eig:1", "--n", "6", "--cap", "1000"]);
    assert_eq!(cap.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&cap.stderr).contains("cap of 1000"));

    assert_eq!(run(&["expect", "--family", "gl", "--class", "eig:1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["expect", "--family", "gl", "--q", "6", "--class", "eig:1", "--n", "2"]).status.code(), Some(2));
    let no_seed = run(&["expect", "--family", "gl", "--q", "2", "--class", "eig:1", "--n", "2", "--mode", "mc"]);
    assert_eq!(no_seed.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["expand", "--family", "sp", "--q", "2", "--lhs", "sp:0", "--rhs", "sp:0"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_single_criterion() {
    let doc = json(&["verify", "--criterion", "7"]);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["criteria"][0]["id"], 7);

    // a cap too small for the sweep is a reported failure
    let out = run(&["verify", "--criterion", "1", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(1));
}
