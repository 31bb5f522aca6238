use std::path::PathBuf;
use std::process::{Command, Output};

fn masslin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_masslin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("masslin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const BUNDLE: &str = r#"{"family":"delta-p-bundle","p":2,"a":[1,0],"lambda":"1","tau":"1"}"#;

#[test]
fn validate_simplex_file() {
    let path = temp_file(
        "simplex.json",
        r#"{"n":2,"conormals":[[-1,0],[0,-1],[1,1]],"offsets":["0","0","1"]}"#,
    );
    let o = masslin(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["delzant"], true);
    assert_eq!(v["vertex_count"], 3);
}

#[test]
fn validate_trapezoid_lists_four_vertices() {
    let o = masslin(&["validate", "--family", r#"{"family":"hirzebruch","k":1,"tau":"2","lambda":"1"}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
}

#[test]
fn malformed_offset_exits_3() {
    let path = temp_file(
        "bad.json",
        r#"{"n":2,"conormals":[[-1,0],[0,-1],[1,1]],"offsets":["0","0","1/0"]}"#,
    );
    let o = masslin(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn non_delzant_exits_2_unless_formal() {
    let path = temp_file(
        "nd.json",
        r#"{"n":2,"conormals":[[-1,0],[0,-1],[1,2]],"offsets":["0","0","2"]}"#,
    );
    let p = path.to_str().unwrap();
    assert_eq!(masslin(&["validate", "--input", p]).status.code(), Some(2));
    assert_eq!(masslin(&["invariant", "--input", p, "--b", "1,0"]).status.code(), Some(2));
    let o = masslin(&["invariant", "--input", p, "--b", "1,0", "--formal"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["formal"], true);
}

#[test]
fn bundle_invariant_is_minus_three_quarters() {
    let o = masslin(&["invariant", "--family", BUNDLE, "--b", "1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "-3/4");
    assert_eq!(v["infinite_order_flag"], true);
    assert_eq!(v["infinite_order_label"], "nonzero I certifies infinite order in π₁(Ham)");
    assert_eq!(v["facets"].as_array().unwrap().len(), 5);
}

#[test]
fn vanishing_invariants() {
    let o = masslin(&["invariant", "--family", r#"{"family":"simplex","n":3,"tau":"5/3"}"#, "--b", "2,-1,4"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "0");
    assert_eq!(v["infinite_order_flag"], false);
    let o = masslin(&["invariant", "--family", r#"{"family":"hirzebruch","k":2,"tau":"5","lambda":"1"}"#, "--b", "1,1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "0");
}

#[test]
fn mass_linear_verdicts() {
    let trunc = r#"{"family":"truncated-simplex","n":3,"tau":"2","lambda":"1"}"#;
    let o = masslin(&["mass-linear", "--family", trunc, "--b", "1,2,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["linear"], true);

    let o = masslin(&["mass-linear", "--family", BUNDLE, "--b", "1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["linear"], false);
    assert!(v["witness"].is_object());

    let o = masslin(&["mass-linear", "--family", BUNDLE, "--b", "0,0,0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["linear"], true);
    assert!(v["coefficients"].as_array().unwrap().iter().all(|c| c == "0"));
}

#[test]
fn mass_linear_output_is_reproducible() {
    let args = ["mass-linear", "--family", BUNDLE, "--b", "1,0,0", "--seed", "7"];
    assert_eq!(masslin(&args).stdout, masslin(&args).stdout);
}

#[test]
fn sweep_rows_match_and_flag_outside_points() {
    let o = masslin(&[
        "sweep",
        "--family",
        r#"{"family":"hirzebruch","k":1,"tau":"2","lambda":"1"}"#,
        "--b",
        "0,1",
        "--grid",
        "tau=1,2,3;lambda=1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["tau", "lambda", "cm_dot_b", "invariant", "closed_form_invariant", "match"]
    );
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 3);
    assert_eq!(&records[0][5], "outside");
    assert!(records[1..].iter().all(|r| &r[5] == "true"));
    for r in &records[1..] {
        for field in [&r[2], &r[3], &r[4]] {
            let q: masslin::Rational = masslin::exact::parse_rational(field).unwrap();
            assert_eq!(masslin::exact::format_rational(&q), field);
        }
    }
}

#[test]
fn bundle_sweep_with_zero_z_is_all_zero() {
    let o = masslin(&["sweep", "--family", BUNDLE, "--b", "1,1,-1", "--grid", "tau=1..2step1/2;lambda=2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for r in rows.records() {
        let r = r.unwrap();
        assert_eq!(&r[3], "0");
        assert_eq!(&r[5], "true");
    }
}

#[test]
fn verify_suites() {
    for suite in ["lemma-moments", "bundle-factorization", "coherence"] {
        let o = masslin(&["verify", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["passed"], true);
    }
    assert_eq!(masslin(&["verify", "no-such-suite"]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(masslin(&["invariant", "--b", "1,0"]).status.code(), Some(3));
    assert_eq!(masslin(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(masslin(&["invariant", "--family", BUNDLE, "--b", "1,x,0"]).status.code(), Some(3));
    assert_eq!(masslin(&["invariant", "--family", BUNDLE, "--b", "1,0"]).status.code(), Some(3));
    assert_eq!(
        masslin(&["sweep", "--family", BUNDLE, "--b", "1,0,0", "--grid", "mu=1..2"]).status.code(),
        Some(3)
    );
}
