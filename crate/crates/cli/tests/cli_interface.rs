//! Exercises the binary end to end: flags, exit codes, output formats.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lejastep"))
}

#[test]
fn checksum_is_invariant_under_thread_count() {
    // the fixed-chunk reductions make results scheduling-independent
    let dir = tempfile::tempdir().unwrap();
    let mut checksums = Vec::new();
    for threads in ["1", "2"] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let status = bin()
            .env("RAYON_NUM_THREADS", threads)
            .args([
                "--problem",
                "burgers",
                "--integrator",
                "exprb32",
                "--n",
                "64",
                "--dt-cfl",
                "8",
                "--t-final",
                "2e-3",
                "--rtol",
                "1e-12",
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let text = std::fs::read_to_string(&out).unwrap();
        let checksum = text
            .lines()
            .find(|l| l.starts_with("summary,"))
            .and_then(|l| l.rsplit(',').next())
            .unwrap()
            .to_string();
        checksums.push(checksum);
    }
    assert_eq!(checksums[0], checksums[1]);
}

#[test]
fn smoke_run_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let status = bin()
        .args([
            "--problem",
            "diff-adv",
            "--integrator",
            "rosenbrock-euler",
            "--n",
            "32",
            "--dt-cfl",
            "10",
            "--t-final",
            "1e-4",
            "--rtol",
            "1e-12",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# lejastep-csv-v1"));
    assert!(text.contains("step,time,dt,iters,error"));
    assert!(text.contains("summary,"));
}

#[test]
fn default_output_path_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .current_dir(dir.path())
        .args([
            "--problem",
            "diff-adv",
            "--integrator",
            "leja-exp",
            "--n",
            "32",
            "--dt-cfl",
            "10",
            "--t-final",
            "1e-5",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("lejastep_run.csv").exists());
}

#[test]
fn unknown_integrator_exits_two_and_names_choices() {
    let output = bin()
        .args(["--integrator", "nosuch", "--n", "32"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("nosuch"), "{err}");
    assert!(err.contains("rosenbrock-euler"), "{err}");
    assert!(err.contains("exprb32"), "{err}");
}

#[test]
fn bad_flag_value_exits_two() {
    let output = bin().args(["--problem", "heat"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_three_with_step_index() {
    // a step so large the 300-node cap cannot converge
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .current_dir(dir.path())
        .args([
            "--problem",
            "diff-adv",
            "--integrator",
            "leja-exp",
            "--n",
            "64",
            "--dt-cfl",
            "1e7",
            "--t-final",
            "10.0",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("step 1"), "{err}");
}

#[test]
fn json_format_emits_valid_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let status = bin()
        .args([
            "--problem",
            "burgers",
            "--integrator",
            "exprb32",
            "--n",
            "32",
            "--dt-cfl",
            "4",
            "--t-final",
            "5e-3",
            "--rtol",
            "1e-10",
            "--format",
            "json",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(value["problem"], "burgers");
    assert_eq!(value["integrator"], "exprb32");
    assert!(!value["steps"].as_array().unwrap().is_empty());
    let summary = &value["summary"];
    assert!(
        summary["total_leja_iters"].as_u64().unwrap() >= summary["total_steps"].as_u64().unwrap()
    );
    assert!(summary["final_state_checksum"]
        .as_str()
        .unwrap()
        .starts_with("0x"));
}

#[test]
fn convergence_mode_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let output = bin()
        .args([
            "--converge",
            "--problem",
            "burgers",
            "--integrator",
            "rosenbrock-euler",
            "--n",
            "32",
            "--t-final",
            "0.02",
            "--rtol",
            "1e-12",
            "--dt-cfl-list",
            "16,8,4",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut orders = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        if !fields[3].is_empty() {
            orders.push(fields[3].parse::<f64>().unwrap());
        }
    }
    assert_eq!(orders.len(), 2);
    for order in orders {
        assert!((order - 2.0).abs() <= 0.4, "observed order {order}");
    }
}
