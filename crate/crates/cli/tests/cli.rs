use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn cocite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocite"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

fn first_ranked_author(dir: &Path) -> String {
    let text = fs::read_to_string(dir.join("ranking.csv")).unwrap();
    text.lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .to_string()
}

#[test]
fn analyze_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let input = fixture("planted_bridge.txt");
    let result = cocite(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--slice-years",
        "2",
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let summary = stdout_json(&result);
    assert_eq!(summary["records"], 20);
    for name in [
        "metrics.csv",
        "ranking.csv",
        "correlation.csv",
        "network.graphml",
        "manifest.json",
    ] {
        assert!(out.join(name).is_file(), "{name}");
    }
    assert_eq!(first_ranked_author(&out), "KOVAC L");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("planted_bridge.txt"), dir.path().join("corpus.txt")).unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "[analysis]\ninput = [\"corpus.txt\"]\nout = \"results\"\nrank_by = \"sigma2\"\nthreshold = \"1,1,1\"\n",
    )
    .unwrap();

    let result = cocite(&[
        "analyze",
        "--config",
        config.to_str().unwrap(),
        "--rank-by",
        "citation",
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let results = dir.path().join("results");
    // six references tie on 10 citations; the earliest year wins
    assert_eq!(first_ranked_author(&results), "DUNN P");

    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(results.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["rank_by"], "citation");
    assert_eq!(manifest["config"]["threshold"]["mode"], "triple");
    assert_eq!(manifest["config"]["threshold"]["c"], 1);
}

#[test]
fn empty_corpus_reports_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let input = fixture("planted_bridge.txt");
    let result = cocite(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--year-min",
        "1900",
        "--year-max",
        "1910",
    ]);
    assert!(!result.status.success());
    assert_eq!(stderr_json(&result)["error"], "EmptyCorpus");
    assert!(!out.exists());
}

#[test]
fn bad_threshold_is_config_error() {
    let input = fixture("planted_bridge.txt");
    let result = cocite(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--out",
        "unused",
        "--threshold",
        "3,3",
    ]);
    assert!(!result.status.success());
    assert_eq!(stderr_json(&result)["error"], "InvalidThreshold");
}

#[test]
fn parse_writes_ndjson_to_stdout() {
    let input = fixture("planted_bridge.txt");
    let result = cocite(&["parse", "--input", input.to_str().unwrap()]);
    assert!(result.status.success());
    assert_eq!(stderr_json(&result)["records"], 20);
    let text = String::from_utf8(result.stdout).unwrap();
    assert_eq!(text.lines().count(), 20);
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["id"], "WOS:PB0001");
}

#[test]
fn simulate_compare_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let result = cocite(&[
        "simulate",
        "--runs",
        "5",
        "--steps",
        "10",
        "--rng-seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert_eq!(stdout_json(&result)["runs"], 5);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
    assert!(
        summary.starts_with("run,rng_seed,median_brokerage,median_preferential_attachment,ratio")
    );
    assert!(out
        .join("network_preferential_attachment_run4.graphml")
        .is_file());
}

#[test]
fn simulate_rejects_invalid_brokerage() {
    let result = cocite(&[
        "simulate",
        "--mechanism",
        "brokerage",
        "--seed-communities",
        "1",
        "--out",
        "unused",
    ]);
    assert!(!result.status.success());
    assert_eq!(stderr_json(&result)["error"], "ConfigInvalid");
}
