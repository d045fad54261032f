//! End-to-end tests of the `mdnewton` binary: exit codes, report round-trips,
//! sweep tables and the verify suites.

use std::process::{Command, Output};

use mdnewton_cli::report::RunReport;

fn mdnewton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdnewton"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn run_converges_with_exit_zero_and_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let log_path = dir.path().join("log.jsonl");
    let out = mdnewton(&[
        "run",
        "--dim",
        "3",
        "--order",
        "4",
        "--precision",
        "d",
        "--columns",
        "1",
        "--seed",
        "7",
        "--report",
        report_path.to_str().unwrap(),
        "--log",
        log_path.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(out.status.code(), Some(0));

    let text = std::fs::read_to_string(&report_path).unwrap();
    let report = RunReport::from_json(&text).unwrap();
    assert!(report.converged);
    assert!(report.iterations <= 24);
    assert!(report.forward_error <= 1.0e3 * 2.2e-16 * 3.0);

    // Parsing and re-serializing is the identity.
    assert_eq!(report.to_json(), text);

    // The JSONL log has one valid record per line.
    let log_text = std::fs::read_to_string(&log_path).unwrap();
    let lines: Vec<&str> = log_text.lines().collect();
    assert_eq!(lines.len(), report.log.len());
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("iteration").is_some());
        assert!(v.get("order").is_some());
    }
}

#[test]
fn order_beyond_octo_double_guarantee_warns() {
    let out = mdnewton(&[
        "run", "--dim", "2", "--order", "96", "--precision", "od", "--max-iters", "2", "--quiet",
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("octo-double guarantee"),
        "missing warning, stderr: {stderr}"
    );
}

#[test]
fn underprovisioned_precision_warns() {
    let out = mdnewton(&[
        "run", "--dim", "2", "--order", "32", "--precision", "dd", "--max-iters", "2", "--quiet",
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("recommends qd"), "stderr: {stderr}");
}

#[test]
fn usage_errors_exit_one() {
    let out = mdnewton(&["run", "--precision", "xd"]);
    assert_eq!(out.status.code(), Some(1));

    let out = mdnewton(&["run", "--columns", "3"]);
    assert_eq!(out.status.code(), Some(1));

    let out = mdnewton(&["sweep", "--axis", "bogus", "--values", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let out = mdnewton(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exhausted_iteration_budget_exits_two() {
    let out = mdnewton(&[
        "run", "--dim", "3", "--order", "4", "--precision", "d", "--max-iters", "1", "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(!stderr.contains("error:"), "unexpected hard error: {stderr}");
}

#[test]
fn sweep_writes_plot_ready_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let out = mdnewton(&[
        "sweep",
        "--dim",
        "2",
        "--order",
        "3",
        "--precision",
        "d",
        "--axis",
        "precision",
        "--values",
        "d,dd,bogus",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4, "header plus three rows: {csv}");
    assert!(lines[0].starts_with("axis,value,status,converged,iterations"));
    assert!(lines[1].starts_with("precision,d,ok,true"));
    assert!(lines[2].starts_with("precision,dd,ok,true"));
    // The bad value is recorded and the sweep continues.
    assert!(lines[3].starts_with("precision,bogus,error"));
}

#[test]
fn sweep_with_no_values_is_header_only() {
    let out = mdnewton(&["sweep", "--axis", "order", "--values", "", "--dim", "2"]);
    // A single empty value is still a row; drop it by passing an empty list.
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().next().unwrap().starts_with("axis,value,status"));
}

#[test]
fn order_sweep_mirrors_the_reference_column() {
    // The doubling-study order column; tiny dimension keeps it fast.
    let values = "1,2,3,5,8,12,18,27,41,62,64";
    let out = mdnewton(&[
        "sweep", "--dim", "2", "--precision", "od", "--axis", "order", "--values", values,
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 12);
    for (line, value) in lines[1..].iter().zip(values.split(',')) {
        assert!(
            line.starts_with(&format!("order,{value},ok,true")),
            "row for {value}: {line}"
        );
    }
}

#[test]
fn verify_passes_and_reports_the_four_suites() {
    let out = mdnewton(&["verify", "--samples", "200", "--seed", "5"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["dyadic-arithmetic", "dense-toeplitz", "symbolic-gradient", "exp-product-law"] {
        assert!(stdout.contains(name), "missing {name} in:\n{stdout}");
        assert!(stdout.contains("PASS"));
    }
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn identical_seed_and_config_reproduce_the_solution() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "run", "--dim", "4", "--order", "6", "--precision", "dd", "--seed", "99", "--quiet",
        "--report",
    ];
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    let mut args1: Vec<&str> = base.to_vec();
    args1.push(p1.to_str().unwrap());
    let mut args2: Vec<&str> = base.to_vec();
    args2.push(p2.to_str().unwrap());
    args2.extend_from_slice(&["--threads", "2"]);

    assert!(mdnewton(&args1).status.success());
    assert!(mdnewton(&args2).status.success());

    let r1 = RunReport::from_json(&std::fs::read_to_string(&p1).unwrap()).unwrap();
    let r2 = RunReport::from_json(&std::fs::read_to_string(&p2).unwrap()).unwrap();
    // Bitwise identical solution limbs and identical operation counts, even
    // with different thread counts.
    assert_eq!(r1.solution, r2.solution);
    assert_eq!(r1.run_ops, r2.run_ops);
    assert_eq!(r1.ledger.total_kernel_ops, r2.ledger.total_kernel_ops);
}
