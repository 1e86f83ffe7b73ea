use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn eval_hellinger_single_coordinate() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", "0.25\n");
    let q = write(&dir, "q.csv", "1.0\n");
    let out = gdiv(&[
        "eval",
        "--divergence",
        "hellinger",
        "--form",
        "bregman",
        "--p",
        p.to_str().unwrap(),
        "--q",
        q.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 1);
    assert!((rows[0]["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(rows[0]["divergence"], "hellinger");
    assert_eq!(rows[0]["form"], "bregman");
    assert!(rows[0].get("skew").is_none());
}

#[test]
fn eval_kl_symmetric_is_jeffreys() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", "x,y\n0.5,0.5\n");
    let q = write(&dir, "q.csv", "0.25,0.75\n");
    let out = gdiv(&[
        "eval",
        "--divergence",
        "kl",
        "--form",
        "sym",
        "--p",
        p.to_str().unwrap(),
        "--q",
        q.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json_lines(&out)[0]["value"].as_f64().unwrap();
    let jeffreys = (0.5 - 0.25) * (0.5f64 / 0.25).ln() + (0.5 - 0.75) * (0.5f64 / 0.75).ln();
    assert!((v - jeffreys).abs() < 1e-12);
    assert!((v - 0.274653).abs() < 1e-6);
}

#[test]
fn eval_jensen_reports_skew_and_broadcasts() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", "0.5,0.5\n");
    let q = write(&dir, "q.csv", "0.25,0.75\n0.5,0.5\n");
    let out = gdiv(&[
        "eval",
        "--divergence",
        "kl",
        "--form",
        "jensen",
        "--skew",
        "0.5",
        "--p",
        p.to_str().unwrap(),
        "--q",
        q.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["skew"], 0.5);
    assert!((rows[0]["value"].as_f64().unwrap() - 0.135288).abs() < 1e-6);
    assert_eq!(rows[1]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn eval_errors_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", "0.5,0.5\n");
    let q3 = write(&dir, "q.csv", "0.2,0.3,0.5\n");
    let bad = write(&dir, "bad.csv", "0.5,-1\n");
    let (p, q3, bad) = (
        p.to_str().unwrap(),
        q3.to_str().unwrap(),
        bad.to_str().unwrap(),
    );

    let out = gdiv(&["eval", "--divergence", "alpha", "--p", p, "--q", p]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    assert_eq!(
        code(&gdiv(&["eval", "--divergence", "kl", "--p", p, "--q", q3])),
        3
    );
    assert_eq!(
        code(&gdiv(&["eval", "--divergence", "kl", "--p", p, "--q", bad])),
        2
    );
    assert_eq!(
        code(&gdiv(&["eval", "--divergence", "nope", "--p", p, "--q", p])),
        2
    );
    assert_eq!(
        code(&gdiv(&[
            "eval",
            "--divergence",
            "kl",
            "--form",
            "jensen",
            "--skew",
            "1",
            "--p",
            p,
            "--q",
            p
        ])),
        2
    );
    assert_eq!(
        code(&gdiv(&[
            "eval",
            "--divergence",
            "kl",
            "--p",
            "/nonexistent",
            "--q",
            p
        ])),
        2
    );
}

#[test]
fn eval_alpha_with_family_index() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.csv", "1.0,2.0\n");
    let q = write(&dir, "q.csv", "2.0,1.0\n");
    let out = gdiv(&[
        "eval",
        "--divergence",
        "alpha",
        "--family-index",
        "2",
        "--p",
        p.to_str().unwrap(),
        "--q",
        q.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    // Half the Pearson chi-square: ((1-2)^2/2 + (2-1)^2/1) / 2.
    let v = json_lines(&out)[0]["value"].as_f64().unwrap();
    assert!((v - 0.75).abs() < 1e-12, "{v}");
}

#[test]
fn centroid_closed_form_means() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pts.csv", "1\n4\n");
    let input = input.to_str().unwrap();
    for (key, expected) in [
        ("hellinger", 2.25),
        ("neyman_chi2", 1.6),
        ("reverse_kl", 2.0),
        ("kl", 2.5),
    ] {
        let out = gdiv(&[
            "centroid",
            "--divergence",
            key,
            "--input",
            input,
            "--side",
            "right",
        ]);
        assert_eq!(code(&out), 0, "{key}");
        let row = &json_lines(&out)[0];
        let c = row["centroid"][0].as_f64().unwrap();
        assert!((c - expected).abs() < 1e-12, "{key}: {c}");
        assert!(row["residual"].as_f64().unwrap() <= 1e-10);
        let obj = row["objective"].as_f64().unwrap();
        let bound = row["jensen_bound"].as_f64().unwrap();
        assert!((obj - bound).abs() <= 1e-10 * (1.0 + bound.abs()));
    }
}

#[test]
fn centroid_single_row_echo_and_weights() {
    let dir = TempDir::new().unwrap();
    let one = write(&dir, "one.csv", "0.3,0.7\n");
    let out = gdiv(&[
        "centroid",
        "--divergence",
        "kl",
        "--input",
        one.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let row = &json_lines(&out)[0];
    assert_eq!(row["centroid"], serde_json::json!([0.3, 0.7]));

    let two = write(&dir, "two.csv", "1\n4\n");
    let out = gdiv(&[
        "centroid",
        "--divergence",
        "kl",
        "--input",
        two.to_str().unwrap(),
        "--weights",
        "0.25,0.75",
    ]);
    assert_eq!(code(&out), 0);
    let c = json_lines(&out)[0]["centroid"][0].as_f64().unwrap();
    assert!((c - 3.25).abs() < 1e-12);

    let out = gdiv(&[
        "centroid",
        "--divergence",
        "kl",
        "--input",
        two.to_str().unwrap(),
        "--weights",
        "0.5,0.25",
    ]);
    assert_eq!(code(&out), 2);
    let out = gdiv(&[
        "centroid",
        "--divergence",
        "kl",
        "--input",
        two.to_str().unwrap(),
        "--weights",
        "0.2,0.3,0.5",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn centroid_left_side_matches_swapped_objective() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pts.csv", "1,2\n4,3\n2,5\n");
    let out = gdiv(&[
        "centroid",
        "--divergence",
        "kl",
        "--input",
        input.to_str().unwrap(),
        "--side",
        "left",
    ]);
    assert_eq!(code(&out), 0);
    let row = &json_lines(&out)[0];
    // Left KL centroid is the geometric mean.
    let c: Vec<f64> = row["centroid"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((c[0] - 8f64.cbrt()).abs() < 1e-12);
    assert!((c[1] - 30f64.cbrt()).abs() < 1e-12);
    assert!(row["residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn cluster_two_groups_and_determinism() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pts.csv", "value\n0.9\n9\n1.1\n11\n");
    let input = input.to_str().unwrap();
    let args = [
        "cluster",
        "--divergence",
        "kl",
        "--input",
        input,
        "--k",
        "2",
        "--seed",
        "3",
    ];
    let a = gdiv(&args);
    let b = gdiv(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let row = &json_lines(&a)[0];
    let asg: Vec<u64> = row["assignments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(asg[0], asg[2]);
    assert_eq!(asg[1], asg[3]);
    assert_ne!(asg[0], asg[1]);
    for key in [
        "assignments",
        "centroids",
        "objective_trace",
        "iterations",
        "converged",
    ] {
        assert!(row.get(key).is_some(), "{key}");
    }
}

#[test]
fn cluster_edge_cases() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pts.csv", "1\n2\n3\n");
    let input = input.to_str().unwrap();
    let out = gdiv(&[
        "cluster",
        "--divergence",
        "hellinger",
        "--input",
        input,
        "--k",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    let trace = json_lines(&out)[0]["objective_trace"].clone();
    assert_eq!(
        trace.as_array().unwrap().last().unwrap().as_f64().unwrap(),
        0.0
    );

    assert_eq!(
        code(&gdiv(&[
            "cluster",
            "--divergence",
            "kl",
            "--input",
            input,
            "--k",
            "4"
        ])),
        5
    );
    assert_eq!(
        code(&gdiv(&[
            "cluster",
            "--divergence",
            "kl",
            "--input",
            input,
            "--k",
            "0"
        ])),
        2
    );
    assert_eq!(
        code(&gdiv(&["cluster", "--divergence", "kl", "--input", input])),
        2
    );
}

#[test]
fn verify_single_suites() {
    let out = gdiv(&[
        "verify",
        "--suite",
        "bj",
        "--divergence",
        "hellinger",
        "--trials",
        "200",
    ]);
    assert_eq!(code(&out), 0);
    let reports: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["pass"], true);
    assert_eq!(reports[0]["trials"], 200);
    assert!(reports[0]["min_gap"].as_f64().unwrap() >= 0.0);

    let out = gdiv(&["verify", "--suite", "cosines", "--trials", "0"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert_eq!(code(&gdiv(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&gdiv(&["verify", "--divergence", "alpha"])), 2);
}

#[test]
fn verify_alpha_member_and_limit_failure_exit() {
    let out = gdiv(&[
        "verify",
        "--suite",
        "cosines",
        "--divergence",
        "alpha",
        "--family-index",
        "0.3",
        "--trials",
        "100",
    ]);
    assert_eq!(code(&out), 0);
    let reports: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports[0]["divergence"], "alpha[0.3]");

    // Chi-square limits do not reach the 1e-3 band on [0.1, 10].
    let out = gdiv(&[
        "verify",
        "--suite",
        "limits",
        "--divergence",
        "pearson_chi2",
        "--trials",
        "100",
    ]);
    assert_eq!(code(&out), 1);
    let reports: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports[0]["pass"], false);
    assert!(reports[0]["worst_case"].is_object());
}

#[test]
fn verify_output_has_sorted_keys() {
    let out = gdiv(&[
        "verify",
        "--suite",
        "oracle",
        "--divergence",
        "kl",
        "--trials",
        "10",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = [
        "\"divergence\"",
        "\"failures\"",
        "\"identity_name\"",
        "\"max_residual\"",
        "\"mean_residual\"",
        "\"pass\"",
        "\"trials\"",
    ];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn help_goes_to_stdout() {
    let out = gdiv(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("verify"));
}
