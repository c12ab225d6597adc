use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn edsketch(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edsketch")).args(args).current_dir(dir).output().expect("run edsketch")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn roundtrip_reports_success_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = edsketch(&["roundtrip", "--n", "1024", "--k", "4", "--delta", "0.1", "--trials", "100"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["experiment"], "roundtrip");
    assert_eq!(report["trials"], 100);
    assert!(report["success_rate"].as_f64().unwrap() >= 0.9);
    for field in ["params", "estimate", "ci_low", "ci_high", "runtime_ms"] {
        assert!(report.get(field).is_some(), "missing {field}");
    }
}

#[test]
fn encode_then_decode_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = edsketch(&["gen", "--generator", "random_edits", "--n", "300", "--k", "0", "--prefix", "same"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for (input, output) in [("same.x", "a.edsk"), ("same.x", "b.edsk")] {
        let out = edsketch(&["encode", input, "-o", output, "--k", "2", "--seed", "9"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let out = edsketch(&["decode", "a.edsk", "b.edsk"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let verdict = json(&out);
    assert_eq!(verdict["verdict"], "result");
    assert_eq!(verdict["distance"], 0);
}

#[test]
fn encode_decode_recovers_planted_distance() {
    let dir = tempfile::tempdir().unwrap();
    edsketch(&["gen", "--generator", "random_edits", "--n", "400", "--k", "3", "--seed", "4"], dir.path());
    for side in ["x", "y"] {
        let out = edsketch(&["encode", &format!("instance.{side}"), "-o", side, "--k", "3", "--seed", "1"], dir.path());
        assert_eq!(out.status.code(), Some(0));
    }
    let out = edsketch(&["decode", "x", "y", "--alphabet", "4"], dir.path());
    assert_eq!(json(&out)["distance"], 3);
}

#[test]
fn error_report_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    edsketch(&["gen", "--generator", "independent", "--n", "200", "--seed", "2"], dir.path());
    let out = edsketch(&["roundtrip", "--x", "instance.x", "--y", "instance.y", "--k", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "error_report");
}

#[test]
fn mismatched_sketches_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    edsketch(&["gen", "--generator", "random_edits", "--n", "100", "--k", "1"], dir.path());
    edsketch(&["encode", "instance.x", "-o", "a", "--k", "2", "--seed", "1"], dir.path());
    edsketch(&["encode", "instance.y", "-o", "b", "--k", "2", "--seed", "2"], dir.path());
    let out = edsketch(&["decode", "a", "b"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("different headers"));
}

#[test]
fn gen_is_reproducible_from_seed() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    for prefix in ["one", "two"] {
        let out = edsketch(&["gen", "--generator", "periodic_adversarial", "--k", "4", "--seed", "5", "--prefix", prefix], dir.path());
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["ground_truth"], 8);
    }
    assert_eq!(read("one.x"), read("two.x"));
    assert_eq!(read("one.y"), read("two.y"));
    assert_ne!(read("one.x"), read("one.y"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["roundtrip", "--k", "many"],
        &["gen", "--generator", "nonsense"],
        &["experiment", "no_such_experiment"],
        &["experiment", "gambler_ruin", "-p", "unknown=1"],
        &["experiment"],
        &["decode", "missing.a", "missing.b"],
    ] {
        let out = edsketch(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn experiment_list_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = edsketch(&["experiment", "--list"], dir.path());
    let names: Vec<String> = json(&out).as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap().to_string()).collect();
    assert!(names.contains(&"gambler_ruin".to_string()));

    let out = edsketch(&["experiment", "gambler_ruin", "--trials", "300", "-p", "a=2", "--csv", "rows.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["params"]["a"], 2.0);
    let csv = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    assert_eq!(csv.lines().count(), 301);
    assert!(csv.starts_with("experiment,trial,success,value"));
}

#[test]
fn calibrate_sweeps_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = edsketch(
        &["calibrate", "--n", "128", "--k", "2", "--trials", "5", "--tau-factors", "0.5,2", "--c-walks", "4"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[1]["params"]["tau_factor"], 2.0);
    assert_eq!(reports[0]["params"]["c_walk"], 4.0);
}
