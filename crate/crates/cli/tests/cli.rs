use std::process::{Command, Output};

use serde_json::Value;

fn gpaley(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpaley")).args(args).env_remove("GPALEY_MAX_Q").output().unwrap()
}

fn gpaley_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpaley")).args(args).env(key, value).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn classify_prints_the_record() {
    let out = gpaley(&["classify", "-p", "3", "-R", "4", "-k", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema"], "gpaley/1");
    assert_eq!(v["variant"], "ConnectedNonHamming");
    assert_eq!(v["valency"], 20);
    assert_eq!(v["one_dim_affine_case"], false);

    let v = json(&gpaley(&["classify", "-p", "2", "-R", "4", "-k", "5"]));
    assert_eq!(v["variant"], "Disconnected");
    assert_eq!((v["a"].as_u64(), v["component_count"].as_u64()), (Some(2), Some(4)));

    let v = json(&gpaley(&["classify", "-p", "3", "-R", "2", "-k", "2"]));
    assert_eq!(v["variant"], "Hamming");
    assert_eq!((v["a"].as_u64(), v["b"].as_u64()), (Some(1), Some(2)));
}

#[test]
fn exit_codes() {
    // Invalid parameters.
    assert_eq!(code(&gpaley(&["classify", "-p", "3", "-R", "4", "-k", "7"])), 2);
    assert_eq!(code(&gpaley(&["classify", "-p", "7", "-R", "1", "-k", "2"])), 2);
    assert_eq!(code(&gpaley(&["classify", "-p", "4", "-R", "1", "-k", "3"])), 2);
    // Internal inconsistency.
    let out = gpaley(&["classify", "-p", "3", "-R", "4", "-k", "10"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hamming"));
    // Usage.
    assert_eq!(code(&gpaley(&["classify", "-p", "3"])), 64);
    assert_eq!(code(&gpaley(&["frobnicate"])), 64);
    assert_eq!(code(&gpaley(&["--help"])), 0);
    assert_eq!(code(&gpaley(&["--version"])), 0);
    // Timeout.
    assert_eq!(code(&gpaley(&["verify", "-p", "3", "-R", "4", "-k", "4", "--timeout", "0"])), 4);
}

#[test]
fn max_q_environment_variable() {
    let args = ["verify", "-p", "2", "-R", "6", "-k", "3"];
    assert_eq!(code(&gpaley_env(&args, "GPALEY_MAX_Q", "32")), 2);
    assert_eq!(code(&gpaley_env(&args, "GPALEY_MAX_Q", "64")), 0);
    assert_eq!(code(&gpaley_env(&args, "GPALEY_MAX_Q", "lots")), 64);
}

#[test]
fn verify_reports_checks() {
    let out = gpaley(&["verify", "-p", "5", "-R", "2", "-k", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema"], "gpaley/1");
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["computed_aut_order"], "300");
    assert_eq!(v["generators"], Value::Null);
    assert_eq!(v["checks"].as_array().unwrap().len(), 7);

    let v = json(&gpaley(&["verify", "-p", "5", "-R", "2", "-k", "4", "--emit-generators"]));
    let gens = v["generators"].as_array().unwrap();
    assert!(!gens.is_empty());
}

#[test]
fn scheme_prints_intersection_numbers() {
    for extra in [&[][..], &["--full-check"][..]] {
        let mut args = vec!["scheme", "-p", "3", "-R", "2", "-k", "4"];
        args.extend_from_slice(extra);
        let out = gpaley(&args);
        assert_eq!(code(&out), 0);
        let v = json(&out);
        assert_eq!(v["primitive"], false);
        let table = v["intersection_numbers"].as_array().unwrap();
        assert_eq!(table.len(), 5);
        // p^0_ii = valency.
        assert_eq!(table[0][1][1], 2);
    }
}

#[test]
fn graph6_output_parses() {
    let out = gpaley(&["graph6", "-p", "5", "-R", "1", "-k", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let g = gpaley_core::Graph::from_graph6(text.trim()).unwrap();
    assert_eq!(g.n(), 5);
    assert_eq!(g.edge_count(), 5);
}

fn scan(args: &[&str]) -> String {
    let mut full = vec!["scan"];
    full.extend_from_slice(args);
    let out = gpaley(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn scan_formats_agree() {
    let jsonl = scan(&["--max-q", "49", "--verify-up-to", "27"]);
    let csv_text = scan(&["--max-q", "49", "--verify-up-to", "27", "--output", "csv"]);
    let from_json: Vec<Value> = jsonl.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), from_json.len());
    for (row, v) in rows.iter().zip(&from_json) {
        for (h, field) in headers.iter().zip(row.iter()) {
            let expected = match &v[h] {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            assert_eq!(field, expected, "column {h}");
        }
    }
    let verified: Vec<&Value> = from_json.iter().filter(|v| v["q"].as_u64().unwrap() <= 27).collect();
    assert!(verified.iter().all(|v| v["checks_passed"] == true));
    assert!(from_json.iter().filter(|v| v["q"].as_u64().unwrap() > 27).all(|v| v["aut_order"].is_null()));
}

#[test]
fn scan_is_ordered_and_deterministic_across_jobs() {
    let one = scan(&["--max-q", "64", "--verify-up-to", "32", "--jobs", "1"]);
    let four = scan(&["--max-q", "64", "--verify-up-to", "32", "--jobs", "4"]);
    assert_eq!(one, four);
    let keys: Vec<(u64, u64)> = one
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["q"].as_u64().unwrap(), v["k"].as_u64().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
}

#[test]
fn scan_resumes_after_a_pair() {
    let all = scan(&["--max-q", "100"]);
    let rest = scan(&["--max-q", "100", "--resume-after", "25,3"]);
    let lines: Vec<&str> = all.lines().collect();
    let cut = lines.iter().position(|l| l.contains("\"q\":25,\"k\":3")).unwrap();
    assert_eq!(rest.lines().collect::<Vec<_>>(), lines[cut + 1..].to_vec());
}

#[test]
fn scan_records_row_errors() {
    let out = scan(&["--max-q", "81"]);
    let row: Value =
        out.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()).find(|v| v["q"] == 81 && v["k"] == 10).unwrap();
    assert!(row["error"].as_str().unwrap().contains("Hamming"));
    assert_eq!(row["variant"], Value::Null);
}
