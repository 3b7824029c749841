//! End-to-end behavior of the `avgk` binary: formats, exit codes,
//! determinism.

use std::path::Path;
use std::process::{Command, Output};

use avgk::io;
use avgk_core::matrix::{LabelVector, ScoreMatrix};
use serde_json::Value;

fn avgk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avgk"))
        .args(args)
        .env_remove("AVGK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

const EX2_SCORES: &str = "1,0,0,0,0,0\n0,0.5,0.5,0,0,0\n0,0,0,0.3333333333333333,0.3333333333333333,0.3333333333333333\n";

fn write_ex2_scores(dir: &Path) -> String {
    let third = 1.0 / 3.0;
    let m = ScoreMatrix::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.5, 0.5, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, third, third, third],
    ])
    .unwrap();
    let path = dir.join("scores.csv");
    io::save_scores(&path, &m).unwrap();
    path.to_str().unwrap().to_string()
}

/// The frequency-weighted realization of the three-zone example: six rows
/// per zone, labels split according to each zone's probabilities.
fn write_ex2_evaluation_fixture(dir: &Path) -> (String, String) {
    let third = 1.0 / 3.0;
    let zone1 = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let zone2 = vec![0.0, 0.5, 0.5, 0.0, 0.0, 0.0];
    let zone3 = vec![0.0, 0.0, 0.0, third, third, third];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..6 {
        rows.push(zone1.clone());
    }
    labels.extend([0; 6]);
    for _ in 0..6 {
        rows.push(zone2.clone());
    }
    labels.extend([1, 1, 1, 2, 2, 2]);
    for _ in 0..6 {
        rows.push(zone3.clone());
    }
    labels.extend([3, 3, 4, 4, 5, 5]);

    let scores = ScoreMatrix::from_rows(&rows).unwrap();
    let labels = LabelVector::new(labels, 6).unwrap();
    let scores_path = dir.join("eval_scores.csv");
    let labels_path = dir.join("eval_labels.txt");
    io::save_scores(&scores_path, &scores).unwrap();
    io::save_labels(&labels_path, &labels).unwrap();
    (
        scores_path.to_str().unwrap().to_string(),
        labels_path.to_str().unwrap().to_string(),
    )
}

#[test]
fn predict_avgk_example2_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write_ex2_scores(dir.path());
    let out = avgk(&["predict", "--scores", &scores, "--mode", "avgk", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_str(&out), "0\n1;2\n3;4;5\n");
    assert!(stderr_str(&out).contains("mean set size: 2"));
}

#[test]
fn predict_topk_fixed_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write_ex2_scores(dir.path());
    let out = avgk(&["predict", "--scores", &scores, "--mode", "topk", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    for line in stdout_str(&out).lines() {
        assert_eq!(line.split(';').count(), 2, "{line}");
    }
}

#[test]
fn predict_mask_output() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write_ex2_scores(dir.path());
    let out = avgk(&[
        "predict", "--scores", &scores, "--mode", "avgk", "--k", "2", "--mask",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_str(&out), "1,0,0,0,0,0\n0,1,1,0,0,0\n0,0,0,1,1,1\n");
}

#[test]
fn predict_rejects_bad_k() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write_ex2_scores(dir.path());
    for (mode, k) in [("topk", "0"), ("avgk", "0"), ("topk", "1.5"), ("avgk", "9")] {
        let out = avgk(&["predict", "--scores", &scores, "--mode", mode, "--k", k]);
        assert_eq!(exit_code(&out), 2, "mode {mode} k {k}");
        assert!(!stderr_str(&out).is_empty());
    }
}

#[test]
fn predict_missing_file_exits_2() {
    let out = avgk(&[
        "predict", "--scores", "/nonexistent.csv", "--mode", "topk", "--k", "1",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn predict_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write_ex2_scores(dir.path());
    let out_path = dir.path().join("sets.txt");
    let out = avgk(&[
        "predict", "--scores", &scores, "--mode", "avgk", "--k", "2", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_str(&out).is_empty());
    assert_eq!(std::fs::read_to_string(out_path).unwrap(), "0\n1;2\n3;4;5\n");
}

#[test]
fn evaluate_matches_frozen_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let (scores, labels) = write_ex2_evaluation_fixture(dir.path());
    let out = avgk(&[
        "evaluate", "--scores", &scores, "--labels", &labels, "--kmax", "3",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["n"], 18);
    assert_eq!(report["c"], 6);

    // Frozen by enumerating the 18 rows by hand: top-K misses are 7, 2, 0;
    // the budgeted strategy misses the six three-way-ambiguous rows at
    // K = 1 and nothing afterwards.
    let expect_top = [7.0 / 18.0, 2.0 / 18.0, 0.0];
    let expect_avg = [6.0 / 18.0, 0.0, 0.0];
    let curves = report["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 3);
    for (i, curve) in curves.iter().enumerate() {
        assert_eq!(curve["k"], i as u64 + 1);
        assert_eq!(curve["top_k_error"].as_f64().unwrap(), expect_top[i]);
        assert_eq!(curve["avg_k_error"].as_f64().unwrap(), expect_avg[i]);
        assert_eq!(
            curve["adaptive_gain"].as_f64().unwrap(),
            expect_top[i] - expect_avg[i]
        );
    }
    assert_eq!(curves[1]["size_histogram"]["1"], 6);
    assert_eq!(curves[1]["size_histogram"]["2"], 6);
    assert_eq!(curves[1]["size_histogram"]["3"], 6);
    assert_eq!(report["mean_top_k_error"].as_f64().unwrap(), 9.0 / 54.0);
    assert_eq!(report["mean_avg_k_error"].as_f64().unwrap(), 6.0 / 54.0);
}

#[test]
fn evaluate_kmax_one_has_single_curve() {
    let dir = tempfile::tempdir().unwrap();
    let (scores, labels) = write_ex2_evaluation_fixture(dir.path());
    let out = avgk(&[
        "evaluate", "--scores", &scores, "--labels", &labels, "--kmax", "1",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["curves"].as_array().unwrap().len(), 1);
}

#[test]
fn evaluate_default_kmax_covers_all_classes() {
    let dir = tempfile::tempdir().unwrap();
    let (scores, labels) = write_ex2_evaluation_fixture(dir.path());
    let out = avgk(&["evaluate", "--scores", &scores, "--labels", &labels]);
    assert_eq!(exit_code(&out), 0);
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    // min(C, 20) with C = 6
    assert_eq!(report["curves"].as_array().unwrap().len(), 6);
}

#[test]
fn evaluate_dimension_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write_ex2_scores(dir.path());
    let labels_path = dir.path().join("labels.txt");
    std::fs::write(&labels_path, "0\n1\n").unwrap();
    let out = avgk(&[
        "evaluate", "--scores", &scores, "--labels",
        labels_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn oracle_example2_analysis() {
    let out = avgk(&["oracle", "--example", "2", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    let analysis: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!((analysis["top_k_error"].as_f64().unwrap() - 1.0 / 9.0).abs() <= 1e-12);
    assert!(analysis["avg_k_error"].as_f64().unwrap().abs() <= 1e-12);
    assert!((analysis["straddle"][0].as_f64().unwrap() - 1.0 / 27.0).abs() <= 1e-12);
    assert_eq!(analysis["support_gap"], Value::Bool(false));
    assert_eq!(analysis["lambda_k"].as_f64().unwrap(), 0.0);
}

#[test]
fn oracle_example1_has_no_gain() {
    let out = avgk(&["oracle", "--example", "1", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    let analysis: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(analysis["adaptive_gain"].as_f64().unwrap().abs() <= 1e-12);
    assert_eq!(analysis["support_gap"], Value::Bool(true));
}

#[test]
fn oracle_requires_a_budget_or_table() {
    let out = avgk(&["oracle", "--example", "2"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn oracle_malformed_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dist.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = avgk(&["oracle", "--spec", path.to_str().unwrap(), "--k", "2"]);
    assert_eq!(exit_code(&out), 2);

    // Well-formed JSON, invalid distribution.
    std::fs::write(
        &path,
        r#"{"n_classes": 2, "zones": [{"weight": 0.4, "eta": [1.0, 0.0]}]}"#,
    )
    .unwrap();
    let out = avgk(&["oracle", "--spec", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn oracle_reads_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dist.json");
    std::fs::write(
        &path,
        r#"{"n_classes": 3, "zones": [
            {"weight": 0.5, "eta": [1.0, 0.0, 0.0]},
            {"weight": 0.5, "eta": [0.0, 0.5, 0.5]}
        ]}"#,
    )
    .unwrap();
    let out = avgk(&["oracle", "--spec", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(exit_code(&out), 0);
    let analysis: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    // Budget 1 splits: the certain zone is solved, half the ambiguous one.
    assert!((analysis["avg_k_error"].as_f64().unwrap() - 0.25).abs() <= 1e-12);
}

#[test]
fn verify_small_sample_is_inconclusive_but_passes() {
    let out = avgk(&["verify", "--example", "2", "--samples", "10", "--seed", "3"]);
    assert_eq!(exit_code(&out), 0);
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["all_passed"], Value::Bool(true));
    let statuses: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["status"].as_str().unwrap())
        .collect();
    assert!(statuses.contains(&"inconclusive"));
    assert!(!statuses.contains(&"fail"));
}

#[test]
fn verify_with_corruption_checks_plugin_bounds() {
    let out = avgk(&[
        "verify", "--example", "2", "--samples", "2000", "--seed", "7", "--corrupt", "0.3",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.starts_with("plugin-corrupt-top")));
    assert!(names.iter().any(|n| n.starts_with("plugin-corrupt-avg")));
    assert_eq!(report["all_passed"], Value::Bool(true));
}

#[test]
fn calibrate_emits_fit_json() {
    let dir = tempfile::tempdir().unwrap();
    let logits_path = dir.path().join("logits.csv");
    let labels_path = dir.path().join("labels.txt");
    std::fs::write(&logits_path, "2,0,1\n0,3,1\n1,0,2\n0,1,3\n").unwrap();
    std::fs::write(&labels_path, "0\n1\n2\n2\n").unwrap();
    let out = avgk(&[
        "calibrate", "--logits",
        logits_path.to_str().unwrap(),
        "--labels",
        labels_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let fit: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let t = fit["temperature"].as_f64().unwrap();
    assert!((1e-3..=1e3).contains(&t));
    assert!(fit["nll_after"].as_f64().unwrap() <= fit["nll_before"].as_f64().unwrap() + 1e-12);
}

#[test]
fn noise_inject_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let labels_path = dir.path().join("labels.txt");
    let groups_path = dir.path().join("groups.json");
    std::fs::write(&labels_path, "0\n1\n2\n0\n2\n1\n").unwrap();
    std::fs::write(&groups_path, r#"{"groups": [[0, 1], [2]]}"#).unwrap();
    let args = [
        "noise-inject", "--labels",
        labels_path.to_str().unwrap(),
        "--groups",
        groups_path.to_str().unwrap(),
        "--seed", "5",
    ];
    let (a, b) = (avgk(&args), avgk(&args));
    assert_eq!(exit_code(&a), 0);
    assert_eq!(stdout_str(&a), stdout_str(&b));
    // Class 2 forms a closed group and never changes.
    for (line, original) in stdout_str(&a).lines().zip(["0", "1", "2", "0", "2", "1"]) {
        if original == "2" {
            assert_eq!(line, "2");
        } else {
            assert!(line == "0" || line == "1");
        }
    }
}

#[test]
fn noise_inject_singleton_groups_are_identity() {
    let dir = tempfile::tempdir().unwrap();
    let labels_path = dir.path().join("labels.txt");
    let groups_path = dir.path().join("groups.json");
    std::fs::write(&labels_path, "0\n1\n2\n").unwrap();
    std::fs::write(&groups_path, r#"{"groups": [[0], [1], [2]]}"#).unwrap();
    let out = avgk(&[
        "noise-inject", "--labels",
        labels_path.to_str().unwrap(),
        "--groups",
        groups_path.to_str().unwrap(),
        "--seed", "9",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_str(&out), "0\n1\n2\n");
}

#[test]
fn thread_cap_env_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write_ex2_scores(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_avgk"))
        .args(["predict", "--scores", &scores, "--mode", "topk", "--k", "1"])
        .env("AVGK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_avgk"))
        .args(["predict", "--scores", &scores, "--mode", "topk", "--k", "1"])
        .env("AVGK_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exit_code(&avgk(&[])), 2);
    assert_eq!(exit_code(&avgk(&["predict"])), 2);
    assert_eq!(exit_code(&avgk(&["oracle", "--example", "2", "--spec", "x", "--k", "2"])), 2);
}

#[test]
fn inline_scores_parse_like_saved_scores() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inline.csv");
    std::fs::write(&path, EX2_SCORES).unwrap();
    let out = avgk(&[
        "predict", "--scores",
        path.to_str().unwrap(),
        "--mode", "avgk", "--k", "2",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_str(&out), "0\n1;2\n3;4;5\n");
}
