use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn splab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splab")).args(args).env_remove("SPLAB_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_example(dir: &Path, eps: &str) -> String {
    let path = dir.join("a.json");
    let o = splab(&["example", "example11", "--eps", eps, "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    path.to_str().unwrap().to_string()
}

fn real(v: &Value) -> f64 {
    v.as_str().map(|s| s.parse().unwrap()).or_else(|| v.as_f64()).unwrap()
}

#[test]
fn eig_of_example_and_exact_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_example(dir.path(), "1e-4");
    let o = splab(&["eig", "--input", &a]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lam: Vec<f64> = v["lambda"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
    for (got, want) in lam.iter().zip([1.01, 0.99, 0.5]) {
        assert!((got - want).abs() < 1e-12);
    }
    let x = splab::linalg::io::matrix_from_json_value(&v["X"]).unwrap();
    let text = serde_json::to_string(&v["X"]).unwrap();
    let back = splab::linalg::io::parse_matrix_json(&text).unwrap();
    assert_eq!(x, back);
}

#[test]
fn diagonal_input_gives_identity_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    std::fs::write(&path, "3,0,0\n0,2,0\n0,0,1\n").unwrap();
    let o = splab(&["eig", "--input", path.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let x = splab::linalg::io::matrix_from_json_value(&v["X"]).unwrap();
    assert_eq!(x.dist_to_identity(), 0.0);
}

#[test]
fn malformed_csv_names_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "1,2\n3,x4\n").unwrap();
    let o = splab(&["eig", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("row 2 column 2"), "{}", stderr(&o));
}

#[test]
fn report_matches_table_columns_and_zero_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_example(dir.path(), "1e-2");
    let o = splab(&["report", "--input", &a, "--perturb", "gaussian:1e-6", "--select", "topk:2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((real(&v["classical_value"]) / 5.0e-5 - 1.0).abs() < 0.02);
    assert!((1e-7..1e-5).contains(&real(&v["measured_sin"])));

    let zero = dir.path().join("zero.csv");
    std::fs::write(&zero, "0,0,0\n0,0,0\n0,0,0\n").unwrap();
    let spec = format!("file:{}", zero.display());
    let o = splab(&["report", "--input", &a, "--perturb", &spec, "--select", "topk:2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(real(&v["measured_sin"]), 0.0);
}

#[test]
fn closed_gap_exits_with_assumption_code_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    std::fs::write(&a, "1,0\n0,0.5\n").unwrap();
    let da = dir.path().join("da.csv");
    std::fs::write(&da, "-0.5,0\n0,0\n").unwrap();
    let spec = format!("file:{}", da.display());
    let out = dir.path().join("r.json");
    let o = splab(&[
        "report",
        "--input",
        a.to_str().unwrap(),
        "--perturb",
        &spec,
        "--select",
        "topk:1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["gap_violated"], Value::Bool(true));
}

#[test]
fn verify_suite_and_worker_count_independence() {
    let one = splab(&["verify", "lemma32", "--cases", "100", "--seed", "42", "--jobs", "1"]);
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    let v: Value = serde_json::from_str(&stdout(&one)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 100);
    assert!(v.as_array().unwrap().iter().all(|c| c["pass"] == Value::Bool(true)));
    let four = splab(&["verify", "lemma32", "--cases", "100", "--seed", "42", "--jobs", "4"]);
    assert_eq!(stdout(&one), stdout(&four));

    let c = splab(&["verify", "contour", "--cases", "10"]);
    assert_eq!(c.status.code(), Some(0));
    assert!(stderr(&c).contains("ratios"));

    let bad = splab(&["verify", "nope"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn seed_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_example(dir.path(), "1e-2");
    let run = |env: Option<&str>, seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_splab"));
        cmd.args(["report", "--input", &a, "--perturb", "gaussian:1e-6", "--select", "topk:2"])
            .env_remove("SPLAB_SEED");
        if let Some(e) = env {
            cmd.env("SPLAB_SEED", e);
        }
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        stdout(&cmd.output().unwrap())
    };
    let default = run(None, None);
    assert_eq!(default, run(None, Some("42")));
    assert_eq!(default, run(Some("7"), Some("42")));
    assert_ne!(default, run(Some("7"), None));
    assert_eq!(run(Some("7"), None), run(None, Some("7")));
}

#[test]
fn table1_sweep_csv_and_divergence_note() {
    let o = splab(&[
        "sweep",
        "table1",
        "--eps-list",
        "1e-2,1e-4,1e-6,1e-8,1e-10",
        "--norm",
        "1e-6",
        "--seed",
        "42",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text
        .starts_with("param,measured_sin,classical,new_perj,new_dl,delta0,delta1,delta_lambda,kappa_X1,kappa_V2,seed"));
    assert!(stderr(&o).contains("eps = 1e-8"));
    let again = splab(&[
        "sweep",
        "table1",
        "--eps-list",
        "1e-2,1e-4,1e-6,1e-8,1e-10",
        "--norm",
        "1e-6",
        "--seed",
        "42",
        "--format",
        "csv",
    ]);
    assert_eq!(text, stdout(&again));
}

#[test]
fn tightness_and_special_sweeps() {
    let o = splab(&["sweep", "tightness", "--r", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("slope"));
    let o = splab(&["sweep", "special", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 10);
    let o = splab(&["sweep", "v2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn usage_errors_exit_one() {
    let o = splab(&["example", "tight", "--r", "3", "--delta", "0.1", "--eps", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("guard"), "{}", stderr(&o));
    assert_eq!(splab(&["eig"]).status.code(), Some(1));
    assert_eq!(splab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(splab(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let a = write_example(dir.path(), "1e-2");
    let o =
        splab(&["report", "--input", &a, "--perturb", "gaussian:1e-6", "--select", "topk:2", "--tol", "nonsense=1"]);
    assert_eq!(o.status.code(), Some(1));
}
