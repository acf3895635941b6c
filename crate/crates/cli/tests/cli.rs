use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn angenent(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_angenent"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constants_table() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(tmp.path(), &["constants", "--n-max", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row2 = text.lines().nth(1).unwrap();
    assert!(
        row2.trim_start().starts_with("2 ") && row2.contains("2.2475865772"),
        "{row2}"
    );
    let csv = fs::read_to_string(tmp.path().join("out/constants_n10.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("n,y_n,kappa_n,E_n,a_n,x_n,lambda_sphere_prev,lower,upper")
    );
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn constants_json_single_row() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(
        tmp.path(),
        &["constants", "--n-max", "2", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0]["E_n"].as_f64().unwrap() - 2.24759).abs() < 5e-6);
    assert!(!tmp.path().join("out/constants_n2.csv").exists());
}

#[test]
fn constants_extended() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(
        tmp.path(),
        &["constants", "--n-max", "3", "--precision", "extended"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json_file(&tmp.path().join("out/constants_n3_extended.json"));
    let e2 = v[0]["E_n"].as_str().unwrap();
    assert!(e2.starts_with("2.2475865772156601828678309"), "{e2}");
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        angenent(tmp.path(), &["constants", "--n-max", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        angenent(tmp.path(), &["shoot", "--n", "1", "--r0", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        angenent(tmp.path(), &["shoot", "--n", "2", "--r0", "torus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        angenent(
            tmp.path(),
            &["shoot", "--n", "2", "--r0", "1", "--rel-tol", "-1"]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        angenent(tmp.path(), &["doughnut", "--n", "2", "--bracket", "3", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(angenent(tmp.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn shoot_cylinder_alias() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(
        tmp.path(),
        &["shoot", "--n", "2", "--r0", "cylinder", "--theta0", "0"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fate"], "ArcLengthExhausted");
    for r in v["r_range"].as_array().unwrap() {
        assert!((r.as_f64().unwrap() - 2f64.sqrt()).abs() <= 1e-6);
    }
    let csv = fs::read_to_string(tmp.path().join("out/shoot_n2_r0_cylinder_theta0_0.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("s,x,r,theta"));
    assert!(!csv.contains('\r'));
    let first = csv.lines().nth(1).unwrap();
    assert_eq!(first.split(',').nth(2).unwrap(), "1.4142135623730951e0");
}

#[test]
fn shoot_sphere_alias() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(
        tmp.path(),
        &[
            "shoot",
            "--n",
            "2",
            "--r0",
            "sphere",
            "--theta0",
            "0",
            "--max-axis-crossings",
            "1",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fate"], "CrossingLimitReached");
    let c = &v["crossings"][0];
    assert!((c["r"].as_f64().unwrap() - 2.0).abs() <= 1e-8);
    assert!((c["s"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() <= 1e-8);
    assert!(v["residual_max"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn shoot_failure_reported_in_json() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(
        tmp.path(),
        &["shoot", "--n", "2", "--r0", "1", "--max-steps", "3"],
    );
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("step"));
    assert!(v["fate"].is_null());
}

#[test]
fn doughnut_n2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(tmp.path(), &["doughnut", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lambda = 1.8512"));
    let v = json_file(&tmp.path().join("out/doughnut_n2.json"));
    for key in [
        "n",
        "R_top",
        "R_bot",
        "length_A",
        "lambda",
        "close_up_error",
        "residual_max",
        "bounds",
    ] {
        assert!(!v[key].is_null(), "{key}");
    }
    assert!((v["lambda"].as_f64().unwrap() - 1.85122).abs() <= 1e-3);
    assert!(v["bounds"]["E_n"].as_f64().unwrap() > v["lambda"].as_f64().unwrap());
}

#[test]
fn doughnut_n3_within_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(tmp.path(), &["doughnut", "--n", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_file(&tmp.path().join("out/doughnut_n3.json"));
    let lambda = v["lambda"].as_f64().unwrap();
    assert!(lambda >= 1.0 && lambda <= v["bounds"]["E_n"].as_f64().unwrap());
    assert!(!tmp.path().join("out/doughnut_n3.csv").exists());
}

#[test]
fn doughnut_without_bracket_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(
        tmp.path(),
        &[
            "doughnut",
            "--n",
            "2",
            "--bracket",
            "5",
            "6",
            "--grid",
            "16",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("miss-angle scan"), "{err}");
    let scan = fs::read_to_string(tmp.path().join("out/doughnut_n2_scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 17);
}

#[test]
fn poincare_scans() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(
        tmp.path(),
        &[
            "poincare", "--n", "2", "--range", "0.5", "3.5", "--grid", "512", "--jobs", "4",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let a = json_file(&tmp.path().join("out/poincare_n2_0.5_3.5_g512.json"));
    let roots: Vec<f64> = a["fixed_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(roots.iter().any(|r| (r - 2.0).abs() <= 1e-8), "{roots:?}");

    let o = angenent(
        tmp.path(),
        &[
            "poincare", "--n", "2", "--range", "0.5", "3.5", "--grid", "1024", "--jobs", "4",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let b = json_file(&tmp.path().join("out/poincare_n2_0.5_3.5_g1024.json"));
    let finer: Vec<f64> = b["fixed_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(roots.len(), finer.len());
    for (x, y) in roots.iter().zip(&finer) {
        assert!((x - y).abs() <= 1e-8);
    }

    let o = angenent(
        tmp.path(),
        &[
            "poincare", "--n", "2", "--range", "3.0", "3.1", "--grid", "8",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn no_overwrite_without_force() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["constants", "--n-max", "4"];
    assert_eq!(angenent(tmp.path(), &args).status.code(), Some(0));
    assert_eq!(angenent(tmp.path(), &args).status.code(), Some(2));
    assert_eq!(
        angenent(tmp.path(), &["constants", "--n-max", "4", "--force"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str, jobs: &str| {
        let o = angenent(
            tmp.path(),
            &[
                "poincare",
                "--n",
                "2",
                "--range",
                "1.0",
                "2.5",
                "--grid",
                "64",
                "--output-dir",
                dir,
                "--jobs",
                jobs,
            ],
        );
        assert_eq!(o.status.code(), Some(0));
        let o = angenent(
            tmp.path(),
            &[
                "constants",
                "--n-max",
                "50",
                "--output-dir",
                dir,
                "--jobs",
                jobs,
            ],
        );
        assert_eq!(o.status.code(), Some(0));
    };
    run("a", "1");
    run("b", "3");
    for name in [
        "poincare_n2_1_2.5_g64.json",
        "poincare_n2_1_2.5_g64.csv",
        "constants_n50.csv",
        "constants_n50.json",
    ] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert!(a == b, "{name} differs");
    }
}

#[test]
fn config_file_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("run.conf"),
        "output_dir = fromfile\nformat = json\nmax_axis_crossings = 1\n",
    )
    .unwrap();
    let o = angenent(
        tmp.path(),
        &[
            "shoot", "--n", "2", "--r0", "sphere", "--config", "run.conf", "--format", "csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["crossings"].as_array().unwrap().len(), 1);
    assert!(tmp
        .path()
        .join("fromfile/shoot_n2_r0_sphere_theta0_0.csv")
        .exists());
    assert!(!tmp
        .path()
        .join("fromfile/shoot_n2_r0_sphere_theta0_0.json")
        .exists());

    fs::write(tmp.path().join("bad.conf"), "colour = red\n").unwrap();
    let o = angenent(
        tmp.path(),
        &["constants", "--n-max", "3", "--config", "bad.conf"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_fast_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(tmp.path(), &["verify", "--suite", "fast"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 6);

    let o = angenent(tmp.path(), &["verify", "--suite", "fast", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suite"], "fast");
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_full_suite_json() {
    let tmp = tempfile::tempdir().unwrap();
    let o = angenent(
        tmp.path(),
        &["verify", "--suite", "full", "--json", "--jobs", "4"],
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ids: Vec<u64> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_u64().unwrap())
        .collect();
    assert_eq!(ids, (1..=10).collect::<Vec<_>>());
    assert_eq!(
        o.status.code(),
        Some(if v["passed"] == true { 0 } else { 1 })
    );
}
