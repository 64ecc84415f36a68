//! End-to-end runs of the installed binary: output shapes, determinism,
//! and the exit-code contract.

use std::process::Command;

use serde_json::Value;

const TS: &str = "2026-08-19T12:00:00Z";

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_coulomb-s3")
}

fn run(args: &[&str]) -> (i32, Vec<u8>, String) {
    let out = Command::new(bin())
        .args(args)
        .output()
        .expect("the binary should run");
    (
        out.status.code().unwrap_or(-1),
        out.stdout,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, stdout, stderr) = run(args);
    let value: Value = serde_json::from_slice(&stdout)
        .unwrap_or_else(|e| panic!("stdout should be JSON ({e}); stderr: {stderr}"));
    (code, value)
}

#[test]
fn spectrum_defaults_match_the_closed_form() {
    let (code, doc) = run_json(&["spectrum", "--n-max", "3", "--timestamp", TS]);
    assert_eq!(code, 0);
    assert_eq!(doc["config"]["subcommand"], "spectrum");
    assert_eq!(doc["config"]["n_max"], 3);
    assert_eq!(doc["config"]["alpha"], 1.0);

    let rows = doc["sections"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for (i, expect) in [-0.5, -0.125, -1.0 / 18.0].iter().enumerate() {
        let energy = rows[i]["energy"].as_f64().unwrap();
        assert!(
            (energy - expect).abs() < 1e-12,
            "level {}: {energy} vs {expect}",
            i + 1
        );
        let ev = rows[i]["energy_ev"].as_f64().unwrap();
        assert!(
            (ev - expect * 27.21).abs() < 1e-10,
            "eV column {ev} vs {}",
            expect * 27.21
        );
    }
}

#[test]
fn energy_unit_override_rescales_the_ev_columns() {
    let (code, doc) = run_json(&[
        "spectrum",
        "--n-max",
        "1",
        "--energy-unit-ev",
        "2.0",
        "--timestamp",
        TS,
    ]);
    assert_eq!(code, 0);
    let row = &doc["sections"][0]["rows"][0];
    assert_eq!(row["energy"].as_f64().unwrap(), -0.5);
    assert_eq!(row["energy_ev"].as_f64().unwrap(), -1.0);
}

#[test]
fn reports_are_byte_deterministic_for_a_pinned_seed_and_timestamp() {
    let args = [
        "eikonal",
        "--pairs",
        "1",
        "--seed",
        "42",
        "--n-points",
        "257",
        "--timestamp",
        TS,
    ];
    let (code_a, first, _) = run(&args);
    let (code_b, second, _) = run(&args);
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(first, second, "identical invocations must serialize identically");

    let mut reseeded = args;
    reseeded[4] = "43";
    let (_, third, _) = run(&reseeded);
    assert_ne!(first, third, "a different seed must draw different endpoints");
}

#[test]
fn json_reports_round_trip_byte_identically() {
    let (_, stdout, _) = run(&["rterm", "--n-max", "2", "--timestamp", TS]);
    let value: Value = serde_json::from_slice(&stdout).unwrap();
    let mut reprinted = serde_json::to_vec_pretty(&value).unwrap();
    reprinted.push(b'\n');
    assert_eq!(
        stdout, reprinted,
        "parse and re-print must reproduce the document byte for byte"
    );
}

#[test]
fn csv_reports_are_one_header_plus_a_row_per_variant_level() {
    let (code, stdout, _) = run(&[
        "rterm",
        "--c",
        "0,1/24",
        "--n-max",
        "2",
        "--format",
        "csv",
        "--timestamp",
        TS,
    ]);
    assert_eq!(code, 0);
    let text = String::from_utf8(stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "header plus 2 levels x 2 coefficients:\n{text}");
    assert_eq!(
        lines[0],
        "c,measure_factor,n,extracted_energy,extracted_energy_ev,analytic_energy,\
         physical_energy,deviation_percent,excluded"
    );
    assert!(
        lines[1].starts_with("0,true,1,") && lines[1].ends_with(",false"),
        "the c = 0 ground level stays included: {}",
        lines[1]
    );
    assert!(
        lines[3].ends_with(",true"),
        "the c = 1/24 rows are excluded: {}",
        lines[3]
    );
}

#[test]
fn an_empty_scan_still_produces_a_valid_document() {
    // the window between the n = 1 and n = 2 levels contains no pole
    let args = [
        "poles",
        "--e-min",
        "-0.45",
        "--e-max",
        "-0.2",
        "--n-expect",
        "0",
        "--scan-points",
        "40",
        "--timestamp",
        TS,
    ];
    let (code, doc) = run_json(&args);
    assert_eq!(code, 0);
    assert_eq!(doc["sections"][0]["rows"].as_array().unwrap().len(), 0);

    let mut csv_args = args.to_vec();
    csv_args.extend_from_slice(&["--format", "csv"]);
    let (code, stdout, _) = run(&csv_args);
    assert_eq!(code, 0);
    let text = String::from_utf8(stdout).unwrap();
    assert_eq!(
        text.lines().count(),
        1,
        "a zero-row table is just its header: {text}"
    );
}

#[test]
fn invalid_configurations_exit_with_the_usage_code() {
    let cases: &[&[&str]] = &[
        &["amplitude", "--energy", "0.5"],
        &["spectrum", "--no-such-flag"],
        &["spectrum", "--c", "1/0"],
        &["spectrum", "--timestamp", "yesterday"],
        &["eikonal", "--from", "1,0,0"],
        &["orbit", "--l-frac", "1.5"],
        &["amplitude", "--n-level", "0"],
        &[],
    ];
    for case in cases {
        let (code, stdout, stderr) = run(case);
        assert_eq!(code, 2, "args {case:?} should be rejected; stderr: {stderr}");
        assert!(
            stdout.is_empty(),
            "a rejected invocation must not emit a report: {case:?}"
        );
    }
}

#[test]
fn help_and_version_exit_cleanly() {
    for case in [["--help"], ["--version"]] {
        let (code, stdout, _) = run(&case);
        assert_eq!(code, 0, "{case:?}");
        assert!(!stdout.is_empty(), "{case:?} should print to stdout");
    }
}

#[test]
fn numerical_failures_keep_the_envelope_and_exit_three() {
    let (code, doc) = run_json(&[
        "poles",
        "--scan-points",
        "3",
        "--n-expect",
        "6",
        "--timestamp",
        TS,
    ]);
    assert_eq!(code, 3);
    assert_eq!(doc["config"]["scan_points"], 3);
    assert_eq!(doc["sections"][0]["name"], "diagnostics");
    assert_eq!(doc["sections"][0]["rows"][0]["ok"], false);
    assert!(!doc["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn unwritable_output_paths_exit_four() {
    let (code, _, stderr) = run(&[
        "spectrum",
        "--output",
        "/nonexistent-dir/report.json",
        "--timestamp",
        TS,
    ]);
    assert_eq!(code, 4, "stderr: {stderr}");
    assert!(stderr.contains("cannot write"), "stderr: {stderr}");
}

#[test]
fn the_config_echo_reproduces_the_run() {
    let (code, stdout, _) = run(&[
        "eikonal",
        "--pairs",
        "2",
        "--seed",
        "9",
        "--n-points",
        "257",
        "--timestamp",
        TS,
    ]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_slice(&stdout).unwrap();
    let config = &doc["config"];

    let rebuilt = [
        config["subcommand"].as_str().unwrap().to_string(),
        format!("--alpha={}", config["alpha"].as_f64().unwrap()),
        format!(
            "--energy-unit-ev={}",
            config["energy_unit_ev"].as_f64().unwrap()
        ),
        format!("--energy={}", config["energy"].as_f64().unwrap()),
        format!("--pairs={}", config["pairs"].as_u64().unwrap()),
        format!("--n-points={}", config["n_points"].as_u64().unwrap()),
        format!("--tol={}", config["tol"].as_f64().unwrap()),
        format!("--seed={}", config["seed"].as_u64().unwrap()),
        format!("--format={}", config["format"].as_str().unwrap()),
        format!("--timestamp={}", config["timestamp"].as_str().unwrap()),
    ];
    let rebuilt_refs: Vec<&str> = rebuilt.iter().map(String::as_str).collect();
    let (code, replayed, _) = run(&rebuilt_refs);
    assert_eq!(code, 0);
    assert_eq!(
        stdout, replayed,
        "feeding the echoed configuration back must reproduce the report"
    );
}

#[test]
fn kernel_reports_the_measure_toggle() {
    let (code, doc) = run_json(&[
        "kernel",
        "--measure",
        "off",
        "--n-modes",
        "2",
        "--timestamp",
        TS,
    ]);
    assert_eq!(code, 0);
    let rows = doc["sections"][0]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["slice_factor"].as_f64().unwrap(), 1.0);
    assert!(!doc["warnings"].as_array().unwrap().is_empty());

    let (code, doc) = run_json(&[
        "kernel",
        "--measure",
        "on",
        "--n-modes",
        "2",
        "--timestamp",
        TS,
    ]);
    assert_eq!(code, 0);
    let rows = doc["sections"][0]["rows"].as_array().unwrap();
    assert!(
        rows[0]["slice_factor"].as_f64().unwrap() < 1.0,
        "with the measure weight the ground mode must decay"
    );
    assert!(doc["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn failed_check_budgets_exit_three() {
    let (code, doc) = run_json(&[
        "harmonics-check",
        "--pairs",
        "5",
        "--gram-tol",
        "1e-30",
        "--timestamp",
        TS,
    ]);
    assert_eq!(code, 3, "an unmeetable budget must fail the run");
    let rows = doc["sections"][0]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["check"], "gram-identity");
    assert_eq!(rows[0]["ok"], false);
    assert_eq!(rows[1]["ok"], true);
}

#[test]
fn verify_all_passes_at_desk_scale() {
    let (code, doc) = run_json(&["verify-all", "--timestamp", TS]);
    assert_eq!(code, 0, "doc: {doc}");
    let rows = doc["sections"][0]["rows"].as_array().unwrap();
    assert!(rows.len() >= 12, "the suite covers every module");
    for row in rows {
        assert_eq!(
            row["ok"], true,
            "{} exceeded its budget: measured {} vs {}",
            row["check"], row["measured"], row["budget"]
        );
    }
}
