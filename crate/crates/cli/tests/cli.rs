use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const WORKED: &str = r#"{
  "p": {"n": 2, "data": [[1, 0], [0, 0]]},
  "q": {"n": 2, "data": [[0.25, 0.4330127018922193], [0.4330127018922193, 0.75]]}
}"#;

fn twoproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoproj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn decompose_worked_pair() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.json", WORKED);
    let out = twoproj(&["decompose", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_stdout(&out);
    assert_eq!(v["dims"], serde_json::json!([0, 0, 1, 1, 0, 0]));
    let q0 = floats(&v["q0_eigs"]);
    assert!((q0[0] - 0.25).abs() < 1e-12);
}

#[test]
fn predict_worked_pair() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.json", WORKED);
    let out = twoproj(&["predict", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_stdout(&out);
    assert_eq!(v["all_ok"], true);
    let predicted = floats(&v["predicted"]);
    assert!((predicted[0] + 0.25).abs() < 1e-12 && (predicted[1] - 0.75).abs() < 1e-12);
    assert!((v["norm_lhs"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn io_and_parse_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"p\": ");
    let out = twoproj(&["decompose", "--input", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(stderr(&out).starts_with("error:"));

    let missing = dir.path().join("missing.json");
    let out = twoproj(&["predict", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = twoproj(&["synthesize", "--q0", "0.2,abc"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_projection_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "half.json",
        r#"{"p": {"n": 2, "data": [[1, 0], [0, 1]]}, "q": {"n": 2, "data": [[1, 0], [0, 0.5]]}}"#,
    );
    let out = twoproj(&["decompose", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("idempotency"), "{}", stderr(&out));

    let out = twoproj(&["synthesize", "--q0", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = twoproj(&["fuzz", "--trials", "1", "--dim-min", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synthesize_then_decompose() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("synth.json");
    let out = twoproj(&[
        "synthesize",
        "--q0",
        "0.7,0.1,0.4",
        "--dims",
        "1,0,2,1",
        "--conjugate-seed",
        "11",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json_stdout(&out)["n"], 10);

    let out = twoproj(&["decompose", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_stdout(&out);
    assert_eq!(v["dims"], serde_json::json!([1, 0, 3, 3, 2, 1]));
    for (got, want) in floats(&v["q0_eigs"]).iter().zip([0.1, 0.4, 0.7]) {
        assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
    }
}

#[test]
fn synthesize_targets_with_negative_values() {
    let out = twoproj(&["synthesize", "--targets", "-0.1875,2,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let spectrum = floats(&json_stdout(&out)["spectrum"]);
    for t in [-0.1875, 2.0, 0.0] {
        assert!(
            spectrum.iter().any(|v| (v - t).abs() < 1e-12),
            "{t} not in {spectrum:?}"
        );
    }
}

#[test]
fn grid_fills_the_interval() {
    let out = twoproj(&["synthesize", "--grid", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_stdout(&out);
    assert!(v["hausdorff_to_bound_interval"].as_f64().unwrap() <= 3.0 / 64.0);
    let spectrum = floats(&v["spectrum"]);
    assert!((spectrum[0] + 0.25).abs() <= 1e-9);
    assert!((spectrum[spectrum.len() - 1] - 2.0).abs() <= 1e-9);
}

fn fuzz_report(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name);
    let mut args = vec![
        "fuzz",
        "--trials",
        "40",
        "--dim-max",
        "12",
        "--seed",
        "5",
        "--synthesized",
        "--omit-timing",
        "--json",
        path.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = twoproj(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn fuzz_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = fuzz_report(dir.path(), "a.json", &[]);
    let b = fuzz_report(dir.path(), "b.json", &[]);
    assert_eq!(a, b);
    let c = fuzz_report(dir.path(), "c.json", &["--parallel"]);
    let d = fuzz_report(dir.path(), "d.json", &["--parallel"]);
    assert_eq!(c, d);

    let serial: Value = serde_json::from_str(&a).unwrap();
    let parallel: Value = serde_json::from_str(&c).unwrap();
    assert_eq!(serial["records"], parallel["records"]);
    assert_eq!(serial["aggregate"], parallel["aggregate"]);
    assert_eq!(serial["aggregate"]["fail_count"], 0);
    assert!(serial["records"][0].get("wall_time_ms").is_none());
}

#[test]
fn fuzz_prints_report_to_stdout() {
    let out = twoproj(&["fuzz", "--trials", "3", "--dim-max", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_stdout(&out);
    assert_eq!(v["records"].as_array().unwrap().len(), 3);
    assert!(stderr(&out).contains("3 / 3 trials passed"));
}
