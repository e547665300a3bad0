//! End-to-end tests of the faasbench binary: exit codes, determinism and
//! output formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn faasbench(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_faasbench"))
        .args(args)
        .current_dir(dir)
        .env_remove("FAASBENCH_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).to_string()
}

#[test]
fn simulate_writes_jsonl_and_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--profile",
        "aws-like",
        "--days",
        "0",
        "--hours",
        "3",
        "--seed",
        "42",
        "--out",
        "a.jsonl",
    ];
    let first = faasbench(&args, dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.contains("records=780"), "{text}");
    assert!(text.contains("cold_fraction=0."), "{text}");

    let mut again = args;
    again[args.len() - 1] = "b.jsonl";
    let second = faasbench(&again, dir.path());
    assert!(second.status.success());

    let a = fs::read(dir.path().join("a.jsonl")).unwrap();
    let b = fs::read(dir.path().join("b.jsonl")).unwrap();
    assert_eq!(a, b, "same seed, same bytes");
    assert_eq!(a.iter().filter(|&&c| c == b'\n').count(), 780);
}

#[test]
fn env_seed_is_used_when_no_flag_is_given() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed_env: Option<&str>, out: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_faasbench"));
        cmd.args([
            "simulate",
            "--profile",
            "azure-like",
            "--days",
            "0",
            "--hours",
            "1",
            "--out",
            out,
        ])
        .current_dir(dir.path());
        match seed_env {
            Some(seed) => cmd.env("FAASBENCH_SEED", seed),
            None => cmd.env_remove("FAASBENCH_SEED"),
        };
        cmd.output().unwrap()
    };
    let with_env = run(Some("7"), "env.jsonl");
    assert!(with_env.status.success());
    assert!(stdout(&with_env).contains("seed=7"));
    let default = run(None, "default.jsonl");
    assert!(stdout(&default).contains("seed=42"));
    assert_ne!(
        fs::read(dir.path().join("env.jsonl")).unwrap(),
        fs::read(dir.path().join("default.jsonl")).unwrap()
    );
}

#[test]
fn zero_duration_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = faasbench(
        &[
            "simulate",
            "--profile",
            "aws-like",
            "--days",
            "0",
            "--out",
            "x.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("duration"));
}

#[test]
fn unknown_profile_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = faasbench(
        &[
            "simulate",
            "--profile",
            "no-such-platform",
            "--out",
            "x.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("preset"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = faasbench(
        &[
            "simulate",
            "--profile",
            "azure-like",
            "--days",
            "0",
            "--hours",
            "1",
            "--out",
            "missing-dir/x.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn analyze_emits_stats_series_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let sim = faasbench(
        &[
            "simulate",
            "--profile",
            "aws-like",
            "--days",
            "4",
            "--out",
            "data.jsonl",
        ],
        dir.path(),
    );
    assert!(sim.status.success(), "{}", stderr(&sim));

    let output = faasbench(
        &["analyze", "--input", "data.jsonl", "--out", "results"],
        dir.path(),
    );
    assert!(output.status.success(), "{}", stderr(&output));
    let cold: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("results/cold_start_stats.json")).unwrap())
            .unwrap();
    let tiers = cold["stats"].as_array().unwrap();
    assert_eq!(tiers.len(), 5, "five memory tiers on this platform");
    assert!(dir.path().join("results/diurnal_fit.json").exists());
    let series = fs::read_to_string(dir.path().join("results/series_disk_mb_per_s.csv")).unwrap();
    assert!(series.starts_with("time,raw,smoothed"));
}

#[test]
fn analyze_single_tier_platform_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let sim = faasbench(
        &[
            "simulate",
            "--profile",
            "azure-like",
            "--days",
            "0",
            "--hours",
            "4",
            "--out",
            "azure.jsonl",
        ],
        dir.path(),
    );
    assert!(sim.status.success());
    let output = faasbench(
        &["analyze", "--input", "azure.jsonl", "--out", "results"],
        dir.path(),
    );
    assert!(output.status.success(), "{}", stderr(&output));
    let cold: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("results/cold_start_stats.json")).unwrap())
            .unwrap();
    assert_eq!(cold["stats"].as_array().unwrap().len(), 1);
}

#[test]
fn truncated_jsonl_line_is_reported_with_its_number() {
    let dir = tempfile::tempdir().unwrap();
    let sim = faasbench(
        &[
            "simulate",
            "--profile",
            "azure-like",
            "--days",
            "0",
            "--hours",
            "1",
            "--out",
            "data.jsonl",
        ],
        dir.path(),
    );
    assert!(sim.status.success());
    let path = dir.path().join("data.jsonl");
    let mut text = fs::read_to_string(&path).unwrap();
    let cut = text.len() - 40;
    text.truncate(cut);
    fs::write(&path, text).unwrap();

    let output = faasbench(
        &["analyze", "--input", "data.jsonl", "--out", "results"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("line 52"), "{}", stderr(&output));
}

#[test]
fn fingerprint_prints_the_topology_table() {
    let dir = tempfile::tempdir().unwrap();
    let sim = faasbench(
        &[
            "simulate",
            "--profile",
            "google-like",
            "--days",
            "0",
            "--hours",
            "2",
            "--out",
            "g.jsonl",
        ],
        dir.path(),
    );
    assert!(sim.status.success());
    let output = faasbench(
        &[
            "fingerprint",
            "--input",
            "g.jsonl",
            "--out",
            "topology.json",
        ],
        dir.path(),
    );
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("unique VMs: not established"));
    assert!(text.contains("counted entity: container-uid"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("topology.json")).unwrap())
            .unwrap();
    assert!(json["unique_vms"].is_null());
}

#[test]
fn decode_cpu_is_a_query_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let hit = faasbench(&["decode-cpu", "62", "2500"], dir.path());
    assert!(hit.status.success());
    assert_eq!(stdout(&hit).trim(), "Intel Xeon E5-2670 v2");

    let azure = faasbench(&["decode-cpu", "79", "2300"], dir.path());
    assert_eq!(stdout(&azure).trim(), "Intel Xeon E5-2673 v4");

    let miss = faasbench(&["decode-cpu", "1", "1"], dir.path());
    assert!(miss.status.success(), "a miss still exits 0");
    assert_eq!(stdout(&miss).trim(), "Unknown");
}

#[test]
fn export_series_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let sim = faasbench(
        &[
            "simulate",
            "--profile",
            "ibm-like",
            "--days",
            "0",
            "--hours",
            "6",
            "--tiers",
            "128",
            "--out",
            "i.jsonl",
        ],
        dir.path(),
    );
    assert!(sim.status.success(), "{}", stderr(&sim));
    let output = faasbench(
        &[
            "export",
            "--input",
            "i.jsonl",
            "--out",
            "series.csv",
            "--series",
            "prime_count",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{}", stderr(&output));
    let text = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "time,raw,smoothed");
    assert_eq!(lines.count(), 6, "one row per tick");

    let neither = faasbench(
        &["export", "--input", "i.jsonl", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(neither.status.code(), Some(1));
}
