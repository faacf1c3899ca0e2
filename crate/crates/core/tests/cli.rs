//! The `nodal-lab` binary: outputs, configuration and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodal-lab"))
        .args(args)
        .env_remove("NODAL_LAB_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_is_identical_across_thread_counts() {
    let args = [
        "simulate",
        "--law",
        "exponential",
        "--n",
        "6",
        "--reps",
        "12",
        "--seed",
        "9",
        "--omit-timing",
    ];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let three = run(&[&args[..], &["--threads", "3"]].concat());
    assert!(one.status.success() && three.status.success());
    assert_eq!(one.stdout, three.stdout);
    let text = stdout(&one);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "law,n,seed,rep,total_length,max_cell_length,wall_ms"
    );
    assert_eq!(lines.count(), 12);
}

#[test]
fn out_dir_gets_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate",
        "--n",
        "3",
        "--reps",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["total_length"]["count"], 5);
    for key in ["mean", "se", "quantiles"] {
        assert!(!summary["total_length"][key].is_null(), "{key}");
    }
    assert!(dir.path().join("simulate.csv").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"command": "simulate", "n": 3, "reps": 4, "law": "rademacher"}"#,
    )
    .unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--reps", "6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().nth(1).unwrap().starts_with("rademacher,3,"));

    let o = run(&["kacrice", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_configs_exit_2() {
    for args in [
        &["simulate", "--n", "0"][..],
        &["simulate", "--law", "cauchy"],
        &["simulate", "--reps", "0"],
        &["kacrice", "--tol", "0.5"],
        &["local", "--source", "nonsense"],
        &["local", "--window", "1,0,0,1"],
        &["smallball", "--reps", "10"],
        &["simulate", "--config", "/nonexistent/c.json"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn threads_env_fallback() {
    let o = Command::new(env!("CARGO_BIN_EXE_nodal-lab"))
        .args(["kacrice", "--n", "1"])
        .env("NODAL_LAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_nodal-lab"))
        .args(["kacrice", "--n", "1", "--threads", "2"])
        .env("NODAL_LAB_THREADS", "0")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn kacrice_cross_value() {
    let o = run(&["kacrice", "--n", "1", "--tol", "1e-6"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-6);
}

#[test]
fn smallball_warns_on_small_order() {
    let o = run(&[
        "smallball",
        "--n",
        "36",
        "--k",
        "12",
        "--l",
        "1",
        "--reps",
        "200",
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order_condition"], false);
}

#[test]
fn plot_is_deterministic_svg() {
    let a = run(&["plot", "--n", "4", "--seed", "3"]);
    let b = run(&["plot", "--n", "4", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let svg = stdout(&a);
    assert!(svg.starts_with("<svg"));
    // [0, 4 pi]^2 at 40 px per unit.
    assert!(svg.contains(r#"width="503""#));
    assert!(svg.matches("<path").count() >= 1);
}

#[test]
fn geometry_and_local_and_compare_run() {
    let o = run(&[
        "geometry-check",
        "--source",
        "nodal",
        "--n",
        "10",
        "--reps",
        "5",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("source,rep,polyline,length,axis_count"));
    let o = run(&[
        "local",
        "--source",
        "g_infinity",
        "--m",
        "16",
        "--reps",
        "4",
        "--reference",
        "f_infinity",
    ]);
    assert!(o.status.success());
    let o = run(&[
        "compare",
        "--n",
        "3",
        "--reps",
        "20",
        "--laws",
        "gaussian,uniform",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pairs"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_passes() {
    let o = run(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
