//! End-to-end tests of the `uk` binary: spawn it, parse its stdout.

use std::process::{Command, Output};

fn uk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uk"))
        .args(args)
        .env_remove("UK_THREADS")
        .output()
        .expect("spawn uk")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "uk failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn anti_koksma_reports_the_closed_form_ratio() {
    let v = json(&uk(&["anti-koksma", "--q", "2", "--M", "3", "--T", "8"]));
    assert_eq!(v["ratio"]["exact"], "6");
    assert_eq!(v["delta"]["exact"], "1/256");
    assert_eq!(v["qmc_error"]["exact"], "3/128");
    assert_eq!(v["taibleson"]["exact"], "2");
}

#[test]
fn anti_koksma_rejects_too_shallow_grids() {
    let out = uk(&["anti-koksma", "--q", "2", "--M", "3", "--T", "4"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn variation_of_a_disc_indicator_is_exact() {
    let v = json(&uk(&[
        "variation",
        "--func",
        r#"{"kind":"indicator","disc":"1:1"}"#,
        "--q",
        "3",
        "--mode",
        "padic",
        "--level",
        "4",
    ]));
    assert_eq!(v["taibleson"]["exact"], "1");
    assert_eq!(v["berkovich"]["exact"], "4/3");
    assert_eq!(v["beer"]["exact"], "2");
}

#[test]
fn discrepancy_reads_point_files_with_multiplicity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.txt");
    std::fs::write(&path, "# two copies of 1, one of 0\n1\n1\n0\n").unwrap();
    let v = json(&uk(&["discrepancy", "--q", "2", "--points", path.to_str().unwrap()]));
    assert_eq!(v["count"], 3);
    assert_eq!(v["delta"]["exact"], "2/3");
}

#[test]
fn discrepancy_of_a_full_grid_is_one_cell() {
    let v = json(&uk(&["discrepancy", "--q", "3", "--points", "grid:3"]));
    assert_eq!(v["count"], 27);
    assert_eq!(v["delta"]["exact"], "1/27");
}

#[test]
fn koksma_report_is_exact_on_rational_inputs() {
    let v = json(&uk(&[
        "koksma",
        "--func",
        r#"{"kind":"indicator","disc":"1:1"}"#,
        "--q",
        "2",
        "--level",
        "3",
        "--points",
        "grid:2",
    ]));
    // A depth-2 grid integrates any level-2 function exactly.
    assert_eq!(v["qmc_error"]["exact"], "0");
    assert_eq!(v["beer"]["holds"], true);
    assert_eq!(v["berkovich"]["holds"], true);
    assert_eq!(v["fourier"]["holds"], true);
}

#[test]
fn sweep_is_byte_stable_and_beer_is_never_best() {
    let args = ["sweep", "--q", "3", "--t-range", "0.25:4:0.25", "--level", "6"];
    let first = uk(&args);
    let second = uk(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let text = String::from_utf8(first.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,c_beer_closed,c_beer_trunc,c_berkovich,c_fourier_trunc,c_fourier_closed"
    );
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6);
        let c_beer: f64 = cols[1].parse().unwrap();
        let c_berk: f64 = cols[3].parse().unwrap();
        assert!(c_berk < c_beer, "row {line}");
        // The closed Fourier column is only defined past t = 1.
        let t: f64 = cols[0].parse().unwrap();
        assert_eq!(cols[5].is_empty(), t <= 1.0, "row {line}");
        rows += 1;
    }
    assert_eq!(rows, 16);
}

#[test]
fn random_generator_is_seeded() {
    let args = ["discrepancy", "--q", "2", "--points", "random:20:3:9"];
    let first = uk(&args);
    let second = uk(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn fourier_dumps_the_coefficient_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coeffs.csv");
    let v = json(&uk(&[
        "fourier",
        "--func",
        r#"{"kind":"indicator","disc":"1:1"}"#,
        "--q",
        "3",
        "--level",
        "2",
        "--dump-coeffs",
        path.to_str().unwrap(),
    ]));
    assert_eq!(v["coefficients"], 9);

    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "index,level,re,im,abs");
    assert_eq!(lines.len(), 10);
    let trivial: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(trivial[..2], ["0", "0"]);
    let integral: f64 = trivial[2].parse().unwrap();
    assert!((integral - 1.0 / 3.0).abs() < 1e-15);
    // A depth-1 disc indicator has |coefficient| = 1/3 exactly for the
    // characters constant on depth-1 discs and 0 for the rest.
    for line in &lines[2..] {
        let cols: Vec<&str> = line.split(',').collect();
        let level: usize = cols[1].parse().unwrap();
        let abs: f64 = cols[4].parse().unwrap();
        let expected = if level <= 1 { 1.0 / 3.0 } else { 0.0 };
        assert!((abs - expected).abs() < 1e-12, "{line}");
    }
}

#[test]
fn composite_q_fourier_requests_fail() {
    let out = uk(&[
        "fourier",
        "--func",
        r#"{"kind":"indicator","disc":"1:1"}"#,
        "--q",
        "4",
        "--mode",
        "series",
        "--level",
        "2",
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("prime"), "{stderr}");
}

#[test]
fn malformed_literals_fail_with_a_diagnostic() {
    let out = uk(&[
        "variation",
        "--func",
        r#"{"kind":"indicator"}"#,
        "--q",
        "3",
        "--level",
        "2",
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("function literal"), "{stderr}");
}

#[test]
fn uk_threads_is_validated() {
    let bad = Command::new(env!("CARGO_BIN_EXE_uk"))
        .args(["discrepancy", "--q", "2", "--points", "grid:2"])
        .env("UK_THREADS", "many")
        .output()
        .unwrap();
    assert!(!bad.status.success());

    let good = Command::new(env!("CARGO_BIN_EXE_uk"))
        .args(["discrepancy", "--q", "2", "--points", "grid:2"])
        .env("UK_THREADS", "4")
        .output()
        .unwrap();
    assert!(good.status.success());
}

#[test]
fn reproduce_passes_end_to_end() {
    let out = uk(&["reproduce"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 9);
    assert!(text.trim_end().ends_with("all 9 checks passed"));
}
