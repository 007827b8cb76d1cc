use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hadamard::ExperimentConfig;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hadamard"));
    c.env_remove("HADAMARD_TOLERANCE_PROFILE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn without_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_seconds");
    v
}

#[test]
fn regular_simplex_attains_the_bound() {
    let out = run(&["jung", "--space", "euclidean:3", "--points", "simplex:3", "--dimension", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let slack = r["results"]["instances"][0]["reports"][0]["slack"].as_f64().unwrap();
    assert!(slack.abs() <= 1e-7, "slack {slack}");
    assert_eq!(r["statements"][0], "thm:raddiam");
    assert_eq!(r["passed"], true);
}

#[test]
fn k1_is_two_thirds_pi() {
    let out = run(&["constants", "--kn", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let k = json(&out)["results"]["constants"][0]["k_n"].as_f64().unwrap();
    assert_eq!(k, 2.0 * std::f64::consts::PI / 3.0);
}

#[test]
fn malformed_config_exits_with_usage_status() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"command\": \"jung\", \"space\": ").unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1 column"), "{err}");

    std::fs::write(&path, r#"{"command": "jung", "colour": 3}"#).unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn bad_flags_and_missing_inputs_are_usage_errors() {
    assert_eq!(run(&["jung", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["jung", "--space", "euclidean:3"]).status.code(), Some(1));
    assert_eq!(run(&["jung", "--space", "klein:3", "--points", "gaussian:4"]).status.code(), Some(1));
    assert_eq!(run(&["constants"]).status.code(), Some(1));
}

#[test]
fn violated_prediction_exits_two_and_still_reports() {
    // The 3-simplex is wider than any set in the line: the n = 1 bound fails.
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "jung",
        "--space",
        "euclidean:3",
        "--points",
        "simplex:3",
        "--dimension",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAILED jung-inequality"));
}

#[test]
fn reports_are_deterministic_across_runs_and_worker_counts() {
    let base = ["jung", "--space", "hyperbolic:2", "--points", "gaussian:9", "--trials", "24", "--seed", "17"];
    let a = json(&run(&[&base[..], &["--workers", "1"]].concat()));
    let b = json(&run(&[&base[..], &["--workers", "3"]].concat()));
    // only the echoed worker count differs
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["checks"], b["checks"]);
    let c = without_wall_time(json(&run(&base)));
    assert_eq!(c, without_wall_time(json(&run(&base))));
    assert_eq!(a["results"], c["results"]);
    let other =
        json(&run(&["jung", "--space", "hyperbolic:2", "--points", "gaussian:9", "--trials", "24", "--seed", "18"]));
    assert_ne!(a["results"], other["results"]);
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let out = run(&["constants", "--kn", "1", "--sn", "0.001", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k_n,r,s_n,d,r_n"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1], "2.0943951023931953e0");
    assert_eq!(row[1].parse::<f64>().unwrap(), 2.0 * std::f64::consts::PI / 3.0);
    assert_eq!(row[2], "1.0000000000000000e-3");
}

#[test]
fn csv_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"command": "c0-demo", "output": {"format": "csv"}}"#).unwrap();
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("index,sup_value,rate\n"));
}

#[test]
fn points_are_read_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("tri.csv");
    std::fs::write(&pts, "0,0\n1,0\n0.5,0.8660254037844386\n").unwrap();
    let out = run(&["circumcenter", "--space", "euclidean:2", "--points", pts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let radius = r["results"]["instances"][0]["result"]["radius"].as_f64().unwrap();
    assert!((radius - 1.0 / 3f64.sqrt()).abs() < 1e-12);

    let tree = dir.path().join("tree.csv");
    std::fs::write(&tree, "0,2\n1,1\n2,3\n").unwrap();
    let out = run(&["jung", "--space", "star:3", "--points", tree.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &json(&out)["results"]["instances"][0]["reports"][0];
    assert_eq!(rep["diameter"].as_f64().unwrap(), 5.0);
    assert_eq!(rep["radius"].as_f64().unwrap(), 2.5);

    std::fs::write(&pts, "0,0\n1,x\n").unwrap();
    let out = run(&["jung", "--space", "euclidean:2", "--points", pts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn tolerance_profile_from_the_environment() {
    let out = bin()
        .args(["constants", "--kn", "2"])
        .env("HADAMARD_TOLERANCE_PROFILE", r#"{"support": 0.001}"#)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["tolerances"]["support"].as_f64(), Some(1e-3));
    assert_eq!(r["tolerances"]["limit_field"].as_f64(), Some(1e-6));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tol.json");
    std::fs::write(&file, r#"{"limit_field": 1e-4}"#).unwrap();
    let out = bin().args(["constants", "--kn", "2"]).env("HADAMARD_TOLERANCE_PROFILE", &file).output().unwrap();
    assert_eq!(json(&out)["tolerances"]["limit_field"].as_f64(), Some(1e-4));

    let out = bin().args(["constants", "--kn", "2"]).env("HADAMARD_TOLERANCE_PROFILE", "{oops").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // an explicit profile in the config wins over the environment
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"command": "constants", "inputs": {"kn": 2}, "tolerances": {"support": 0.5}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["run", dir.path().join("c.json").to_str().unwrap()])
        .env("HADAMARD_TOLERANCE_PROFILE", r#"{"support": 0.001}"#)
        .output()
        .unwrap();
    assert_eq!(json(&out)["tolerances"]["support"].as_f64(), Some(0.5));
}

#[test]
fn golden_configs_parse() {
    let mut count = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 12);
}

#[test]
fn quick_golden_configs_pass() {
    for name in [
        "jung-simplex",
        "constants",
        "hilbert",
        "c0-demo",
        "comparison",
        "filtering-tree",
        "flow-busemann",
        "energy",
        "semicontraction",
    ] {
        let path = configs().join(format!("{name}.json"));
        let out = run(&["run", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["passed"], true, "{name}");
    }
}

#[test]
fn flow_trajectory_csv_has_the_documented_columns() {
    let field = r#"{"form": "affine", "normal": [1.0, 0.0], "constant": 0.0}"#;
    let out = run(&[
        "flow",
        "--space",
        "euclidean:2",
        "--field",
        field,
        "--start",
        "0,0",
        "--step",
        "0.01",
        "--horizon",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x0,x1,f,grad_norm"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    // the flow of -<x, e_1> moves at unit speed along -e_1
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!((last[1] + 1.0).abs() < 1e-9);
    assert!((last[4] - 1.0).abs() < 1e-12);
}
