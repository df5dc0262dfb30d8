use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const E1: &str = r#"{
  "name": "e1",
  "ground_set_size": 6,
  "rank": 3,
  "hyperedges": [{"elements": [0, 1, 2], "bound": 2}],
  "pairs": [{"A1": [0, 1, 3], "A2": [2, 4, 5], "B1": [0, 1, 4], "B2": [2, 3, 5]}]
}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_basis-exchange"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_worked_pair() {
    let dir = TempDir::new().unwrap();
    let e1 = write(&dir, "e1.json", E1);
    let out = bin(&["solve", "--instance", arg(&e1), "--cross-check"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    let record = &report["records"][0];
    assert_eq!(record["distance"], 1);
    assert_eq!(record["lower_bound"], 1);
    assert_eq!(record["cross_check"]["agrees"], true);
    assert_eq!(record["sequence"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_writes_report_file() {
    let dir = TempDir::new().unwrap();
    let e1 = write(&dir, "e1.json", E1);
    let report = dir.path().join("report.json");
    let out = bin(&["solve", "--instance", arg(&e1), "--output", arg(&report)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(report).unwrap();
    assert!(text.contains("\"command\": \"solve\""));
}

#[test]
fn invalid_representation_exits_1_with_violations() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"name": "bad", "ground_set_size": 6, "rank": 3,
            "hyperedges": [{"elements": [0, 1, 2, 3], "bound": 2}, {"elements": [1, 2, 3, 4], "bound": 2}]}"#,
    );
    let out = bin(&["solve", "--instance", arg(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("(H1) fails for hyperedges 0 and 1"));
}

#[test]
fn malformed_and_missing_files_exit_1() {
    let dir = TempDir::new().unwrap();
    let junk = write(&dir, "junk.json", "{ not json");
    assert_eq!(code(&bin(&["solve", "--instance", arg(&junk)])), 1);
    assert_eq!(code(&bin(&["solve", "--instance", "/nonexistent/instance.json"])), 1);
}

#[test]
fn incompatible_pair_exits_2() {
    let dir = TempDir::new().unwrap();
    let text = E1.replace(r#""B1": [0, 1, 4], "B2": [2, 3, 5]"#, r#""B1": [0, 1, 4], "B2": [0, 1, 4]"#);
    let path = write(&dir, "incompatible.json", &text);
    assert_eq!(code(&bin(&["solve", "--instance", arg(&path)])), 2);
}

#[test]
fn gen_is_deterministic_and_loads() {
    let args = [
        "gen", "--family", "sparse-paving", "--n", "8", "--r", "4", "--seed", "7", "--density", "5",
    ];
    let first = bin(&args);
    let second = bin(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.contains("\"rng\""));
    assert!(text.contains("\"seed\": 7"));

    let dir = TempDir::new().unwrap();
    let path = write(&dir, "sp.json", &text);
    let out = bin(&["check-white2", "--instance", arg(&path)]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["records"].as_array().unwrap().iter().all(|r| r["consistent"] == true));
}

#[test]
fn gen_uniform_and_k4() {
    let u = json(&bin(&["gen", "--family", "uniform", "--n", "4", "--r", "2"]));
    assert_eq!(u["ground_set_size"], 4);
    assert_eq!(u["rank"], 2);
    assert_eq!(u["hyperedges"].as_array().unwrap().len(), 0);

    let k4 = json(&bin(&["gen", "--family", "k4"]));
    assert_eq!(k4["ground_set_size"], 6);
    assert_eq!(k4["hyperedges"].as_array().unwrap().len(), 4);
}

#[test]
fn gen_rejects_bad_parameters() {
    assert_eq!(code(&bin(&["gen", "--family", "paving", "--n", "3", "--r", "5"])), 1);
    assert_ne!(code(&bin(&["gen", "--family", "no-such-family"])), 0);
}

#[test]
fn check_gabow_on_k4() {
    let dir = TempDir::new().unwrap();
    let k4 = write(&dir, "k4.json", &stdout(&bin(&["gen", "--family", "k4"])));
    let out = bin(&["check-gabow", "--instance", arg(&k4)]);
    assert_eq!(code(&out), 0);
    let records = json(&out)["records"].as_array().unwrap().clone();
    assert_eq!(records.len(), 16 * 16);
    assert!(records.iter().all(|r| r["valid"] == true && r["ordering"].is_object()));
}

#[test]
fn check_equitable_skips_unpartitionable() {
    let dir = TempDir::new().unwrap();
    let u25 = write(&dir, "u25.json", &stdout(&bin(&["gen", "--family", "uniform", "--n", "5", "--r", "2"])));
    let out = bin(&["check-equitable", "--instance", arg(&u25)]);
    assert_eq!(code(&out), 0);
    let record = &json(&out)["records"][0];
    assert_eq!(record["skipped"], true);
    assert_eq!(record["result"]["status"], "not_partitionable");

    let k4 = write(&dir, "k4.json", &stdout(&bin(&["gen", "--family", "k4"])));
    let out = bin(&["check-equitable", "--instance", arg(&k4)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["records"][0]["result"]["status"], "equitable");
}

#[test]
fn brute_force_over_caps_exits_4() {
    let dir = TempDir::new().unwrap();
    let k4 = write(&dir, "k4.json", &stdout(&bin(&["gen", "--family", "k4"])));
    assert_eq!(code(&bin(&["distance-bf", "--instance", arg(&k4), "--cap-nodes", "3"])), 4);
    assert_eq!(code(&bin(&["check-gabow", "--instance", arg(&k4), "--cap-rank", "2"])), 4);
}

#[test]
fn distance_and_monotone_commands() {
    let dir = TempDir::new().unwrap();
    let k4 = write(&dir, "k4.json", &stdout(&bin(&["gen", "--family", "k4"])));
    let out = bin(&["distance-bf", "--instance", arg(&k4)]);
    assert_eq!(code(&out), 0);
    let records = json(&out)["records"].as_array().unwrap().clone();
    assert!(records.iter().any(|r| r["distance"] == 3));

    let out = bin(&["longest-monotone", "--instance", arg(&k4)]);
    assert_eq!(code(&out), 0);
    for r in json(&out)["records"].as_array().unwrap() {
        assert_eq!(r["length"], r["bf_length"]);
    }
}

#[test]
fn selftest_smoke_reports_every_criterion() {
    let out = bin(&["selftest", "--scale", "smoke"]);
    let text = stdout(&out);
    for id in 1..=9 {
        assert!(text.contains(&format!("criterion {id} [")), "{text}");
    }
    for id in 1..=8 {
        assert!(text.contains(&format!("criterion {id} [PASS]")), "{text}");
    }
    let any_failed = text.contains("[FAIL]");
    assert_eq!(code(&out), if any_failed { 5 } else { 0 });
}

#[test]
fn selftest_catches_a_corrupted_solver() {
    let dir = TempDir::new().unwrap();
    let witness = dir.path().join("first-failure.json");
    let out = bin(&["selftest", "--scale", "smoke", "--inject-fault", "--output", arg(&witness)]);
    assert_eq!(code(&out), 5);
    assert!(stdout(&out).contains("criterion 1 [FAIL]"));
    let text = std::fs::read_to_string(witness).unwrap();
    assert!(text.contains("\"pairs\""));
}
