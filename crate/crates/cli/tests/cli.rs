use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectrafrac"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("SPECTRAFRAC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn cantor_measure_oracle_has_256_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["oracle", "cantor-measure", "--depth", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("cantor_measure_8.csv")).unwrap();
    let rows = csv.lines().filter(|l| !l.starts_with('#') && *l != "position,weight").count();
    assert_eq!(rows, 256);
    let m = manifest(dir.path(), "oracle-cantor-measure.manifest.json");
    assert_eq!(m["config"]["depth"], 8);
}

#[test]
fn measure_dim_on_the_cantor_oracle() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["oracle", "cantor-measure", "--depth", "14"]).status.success());
    let csv = dir.path().join("cantor_measure_14.csv");
    let o = run(dir.path(), &["measure-dim", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("measure_dims.json")).unwrap()).unwrap();
    for key in ["dim_h_upper", "dim_p_lower"] {
        let d = report[key].as_f64().unwrap();
        assert!((0.58..=0.68).contains(&d), "{key} = {d}");
    }
    let m = manifest(dir.path(), "measure-dim.manifest.json");
    assert_eq!(m["seed"], 0);
    assert!(m["outputs"].as_array().unwrap().iter().any(|v| v == "measure_dims.json"));
}

#[test]
fn seed_determines_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    for dir in [&a, &b, &c] {
        assert!(run(dir.path(), &["oracle", "cantor-measure", "--depth", "12"]).status.success());
    }
    let go = |dir: &Path, seed: &str, jobs: &str| {
        let csv = dir.join("cantor_measure_12.csv");
        let o = run(dir, &["--seed", seed, "--jobs", jobs, "measure-dim", csv.to_str().unwrap(), "--n-sample", "50"]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read_to_string(dir.join("measure_dims_points.csv")).unwrap()
    };
    assert_eq!(go(a.path(), "9", "1"), go(b.path(), "9", "3"));
    assert_ne!(go(a.path(), "9", "1"), go(c.path(), "10", "1"));
}

#[test]
fn spectral_set_profile_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("spec.json"), r#"{"variant": "periodic", "cell": [0.5, -0.5], "bound": 0.5}"#).unwrap();
    let spec = d.join("spec.json");
    let o = run(d, &["spectral", spec.to_str().unwrap(), "--n", "301", "--psi", "delta1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("atoms"));
    let measure = d.join("spectral_measure.csv");
    let m = measure.to_str().unwrap();

    let o = run(d, &["profile", m, "--x", "1.0", "--alpha", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(d.join("profile.csv")).unwrap().lines().count() > 10);

    let o = run(d, &["classify", m, "--alpha", "0.5", "--r", "2", "--s", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("classification.json")).unwrap()).unwrap();
    let total = report["kc_mass"].as_f64().unwrap() + report["ks_mass"].as_f64().unwrap();
    assert!((total - 1.0).abs() < 1e-9);

    assert!(run(d, &["oracle", "cantor-set", "--depth", "10"]).status.success());
    let set = d.join("cantor_set_10.json");
    let o = run(d, &["set-dim", set.to_str().unwrap(), "--delta", "1e-4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("set_dims.json")).unwrap()).unwrap();
    assert!((summary["box_dimension"].as_f64().unwrap() - 0.6309).abs() < 0.05);
    for name in ["spectral", "profile", "classify", "set-dim"] {
        assert!(d.join(format!("{name}.manifest.json")).exists(), "{name}");
    }
}

#[test]
fn experiments_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("w.json"),
        r#"{
        "ac_endpoint": {"variant": "periodic", "cell": [0.0], "bound": 0.0},
        "pp_endpoint": {"variant": "random", "seed": 4, "bound": 10.0},
        "lambdas": [0.0, 1.0],
        "n": 301,
        "table": "small.csv"
    }"#,
    )
    .unwrap();
    let o = run(d, &["--seed", "4", "experiment", "wonderland", d.join("w.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(d.join("small.csv")).unwrap().lines().count(), 4);
    assert_eq!(manifest(d, "experiment-wonderland.manifest.json")["seed"], 4);

    let lp = r#"{
        "spec": {"variant": "limit_periodic", "g": {"terms": [{"depth": 1, "table": [0.1, -0.1]}]},
                 "kappa": [0, 0, 0, 0], "bound": 0.1},
        "depths": [1],
        "n": 301
    }"#;
    fs::write(d.join("lp.json"), lp).unwrap();
    let o = run(d, &["experiment", "limit-periodic", d.join("lp.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(d.join("limit_periodic.csv").exists());
}

#[test]
fn malformed_config_is_a_usage_error_with_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.json"), "{\n  \"n\": 101,\n  \"lambdas\": [0, 1],\n  \"bogus\": true\n}").unwrap();
    let o = run(d, &["experiment", "wonderland", d.join("bad.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    fs::write(d.join("bad.csv"), "position,weight\n0.1,0.5\nnope,0.5\n").unwrap();
    let o = run(d, &["measure-dim", d.join("bad.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["--bogus"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["oracle", "cantor-measure", "--depth", "99"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["measure-dim", "/nonexistent/file.csv"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["validate", "--criterion", "13"]).status.code(), Some(2));
}

#[test]
fn validate_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["validate", "--criterion", "9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("[PASS]  9"));
    assert!(dir.path().join("validation/09/odometer.csv").exists());
}

#[test]
fn validate_full_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["validate"]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).matches("[PASS]").count(), 12);
    assert!(dir.path().join("validate.manifest.json").exists());
}

#[test]
fn bound_violation_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("spec.json"), r#"{"variant": "explicit", "values": [0.0, 5.0], "origin": 0, "bound": 1.0}"#)
        .unwrap();
    let o = run(d, &["spectral", d.join("spec.json").to_str().unwrap(), "--n", "11"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("invariant"), "{}", stderr(&o));
}
