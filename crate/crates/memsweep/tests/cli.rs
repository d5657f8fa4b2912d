//! End-to-end checks of the `memsweep` binary: exit codes, output formats,
//! and flag/config precedence.

use std::path::PathBuf;
use std::process::{Command, Output};

fn memsweep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memsweep"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("memsweep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn graph_dump_emits_the_documented_schema() {
    let out = memsweep(&["graph-dump", "--distance", "3", "--rounds-mult", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["d"], 3);
    assert_eq!(v["n"], 3);
    // 4 layers of 12 vertices; 13 space edges per layer + 6 time per gap
    assert_eq!(v["vertices"].as_array().unwrap().len(), 48);
    assert_eq!(v["edges"].as_array().unwrap().len(), 4 * 13 + 3 * 6);
    assert!(v["edges"][0].get("kind").is_some());
}

#[test]
fn run_emits_jsonl_by_default_and_csv_on_request() {
    let args = [
        "run",
        "--distance",
        "3",
        "--noise",
        "0.003",
        "--rounds-mult",
        "50",
        "--seed",
        "8",
    ];
    let out = memsweep(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(rec["method"], "new");
    assert_eq!(rec["d"], 3);
    assert_eq!(rec["n"], 150);
    assert!(rec["f_hat"].is_number());

    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let out = memsweep(&csv_args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("method,d,p,q,seed,n,decoder,"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn compare_reports_agreement_per_cell() {
    let out = memsweep(&[
        "compare",
        "--distance",
        "3",
        "--noise",
        "0.01",
        "--rounds-mult",
        "2000",
        "--shots",
        "2000",
        "--seed",
        "14",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(rec["method"], "compare");
    assert!(rec["agree"].is_boolean());
    assert!(rec["new"]["f_hat"].is_number());
    assert!(rec["legacy"]["f_hat"].is_number());
}

#[test]
fn config_file_fills_gaps_but_flags_win() {
    let cfg = tmp("plan.conf");
    std::fs::write(
        &cfg,
        "distance = 3\nnoise = 0.004   # from file\nrounds-mult = 40\nseed = 5\n",
    )
    .unwrap();
    let base = memsweep(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(base.status.success());
    let rec: serde_json::Value =
        serde_json::from_slice(base.stdout.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(rec["p"], 0.004);
    assert_eq!(rec["n"], 120);

    // the explicit flag overrides the file value
    let over = memsweep(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--noise",
        "0.002",
    ]);
    assert!(over.status.success());
    let rec: serde_json::Value =
        serde_json::from_slice(over.stdout.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(rec["p"], 0.002);
    assert_eq!(rec["n"], 120, "file still supplies rounds-mult");
}

#[test]
fn usage_errors_exit_1() {
    // unknown flag
    assert_eq!(memsweep(&["run", "--frobnicate"]).status.code(), Some(1));
    // malformed flag value
    assert_eq!(
        memsweep(&["run", "--distance", "three"]).status.code(),
        Some(1)
    );
    // even distance rejected upfront
    assert_eq!(
        memsweep(&["run", "--distance", "4", "--noise", "0.01"]).status.code(),
        Some(1)
    );
    // bad config key
    let cfg = tmp("bad.conf");
    std::fs::write(&cfg, "frobnicate = 1\n").unwrap();
    let out = memsweep(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
    // graph-dump wants exactly one distance
    assert_eq!(
        memsweep(&["graph-dump", "--distance", "3,5"]).status.code(),
        Some(1)
    );
    // help is not an error
    assert_eq!(memsweep(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_2() {
    // commit >= window only surfaces once the decoder runs
    let out = memsweep(&[
        "run",
        "--distance",
        "3",
        "--noise",
        "0.01",
        "--rounds-mult",
        "20",
        "--window",
        "5",
        "--commit",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn out_flag_writes_the_same_payload_as_stdout() {
    let path = tmp("run.jsonl");
    let args = [
        "run",
        "--distance",
        "3",
        "--noise",
        "0.005",
        "--rounds-mult",
        "30",
        "--seed",
        "77",
    ];
    let stdout_run = memsweep(&args);
    let mut file_args = args.to_vec();
    file_args.extend(["--out", path.to_str().unwrap()]);
    let file_run = memsweep(&file_args);
    assert!(stdout_run.status.success() && file_run.status.success());

    let strip = |text: &str| {
        text.lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("wall_time_ms");
                v
            })
            .collect::<Vec<_>>()
    };
    let a = strip(&String::from_utf8(stdout_run.stdout).unwrap());
    let b = strip(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(a, b);
}
