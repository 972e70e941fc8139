//! End-to-end tests of the `cgsim` binary.

use std::path::Path;
use std::process::{Command, Output};

fn cgsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgsim"))
        .args(args)
        .output()
        .expect("spawn cgsim")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const MINIMAL: &str = "\
[config]
period = 10
offsets = 0,1,2,3
k = 4
pattern = 0,2,3,1
scheme = flexible

[traffic]
kind = uniform
lo = 0
hi = 3

[channel]
epsilon = 0.1

[sim]
packets = 20000
";

#[test]
fn simulate_writes_a_csv_report() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "demo.cfg", MINIMAL);
    let out = dir.path().join("report.csv");
    let result = cgsim(&[
        "simulate",
        "--scenario",
        &scenario,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0]
        .starts_with("scenario_id,scheme,T,K,gap,epsilon,collision,packets,seed,reliability"));
    assert!(lines[1].starts_with("demo,flexible,4,4,0,0.100000,0,20000,1,"));
}

#[test]
fn seed_and_packet_overrides_show_up_in_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "demo.cfg", MINIMAL);
    let result = cgsim(&[
        "simulate",
        "--scenario",
        &scenario,
        "--seed",
        "7",
        "--packets",
        "5000",
    ]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    let data = stdout.lines().nth(1).unwrap();
    let fields: Vec<&str> = data.split(',').collect();
    assert_eq!(fields[7], "5000");
    assert_eq!(fields[8], "7");
}

#[test]
fn dimension_prints_the_minimal_window() {
    let dir = tempfile::tempdir().unwrap();
    let text = MINIMAL
        .replace("offsets = 0,1,2,3", "offsets = 0")
        .replace("k = 4", "k = 1")
        .replace("kind = uniform\nlo = 0\nhi = 3", "kind = always\nslot = 0");
    let scenario = write_scenario(dir.path(), "dim.cfg", &text);
    let result = cgsim(&["dimension", "--scenario", &scenario, "--target", "0.9999"]);
    assert!(result.status.success());
    assert_eq!(String::from_utf8_lossy(&result.stdout), "4\n");

    let result = cgsim(&["dimension", "--scenario", &scenario, "--target", "0.99"]);
    assert_eq!(String::from_utf8_lossy(&result.stdout), "2\n");
}

#[test]
fn wastage_prints_the_expected_value() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "w.cfg", MINIMAL);
    let result = cgsim(&["wastage", "--scenario", &scenario]);
    assert!(result.status.success());
    assert_eq!(String::from_utf8_lossy(&result.stdout), "1.50000\n");
}

#[test]
fn analyze_prints_breakdown_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "a.cfg", MINIMAL);
    let result = cgsim(&["analyze", "--scenario", &scenario]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.starts_with("arrival_offset,to_index,probability,cg_reps,shared_reps,success"));
    assert!(stdout.contains("exact_reliability = "));
}

#[test]
fn sweep_emits_header_plus_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "s.cfg", MINIMAL);
    let result = cgsim(&[
        "sweep",
        "--scenario",
        &scenario,
        "--sweep",
        "channel.epsilon=0.05,0.1,0.2",
        "--packets",
        "10000",
    ]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    let reliability: Vec<f64> = lines[1..]
        .iter()
        .map(|line| line.split(',').nth(11).unwrap().parse().unwrap())
        .collect();
    assert!(reliability[0] > reliability[1] && reliability[1] > reliability[2]);
}

#[test]
fn table_and_csv_agree_field_for_field() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "t.cfg", MINIMAL);
    let csv = cgsim(&["simulate", "--scenario", &scenario, "--packets", "2000"]);
    let table = cgsim(&[
        "simulate",
        "--scenario",
        &scenario,
        "--packets",
        "2000",
        "--format",
        "table",
    ]);
    let csv_out = String::from_utf8_lossy(&csv.stdout);
    let table_out = String::from_utf8_lossy(&table.stdout);
    let csv_fields: Vec<&str> = csv_out.lines().nth(1).unwrap().split(',').collect();
    let table_fields: Vec<&str> = table_out
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .collect();
    assert_eq!(csv_fields, table_fields);
}

#[test]
fn json_lines_format_is_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "j.cfg", MINIMAL);
    let result = cgsim(&[
        "simulate",
        "--scenario",
        &scenario,
        "--packets",
        "2000",
        "--format",
        "json-lines",
    ]);
    let stdout = String::from_utf8_lossy(&result.stdout);
    let value: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(value["scenario_id"], "j");
    assert_eq!(value["packets"], 2000);
}

#[test]
fn multi_config_scenarios_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let text = "\
[config]
period = 10
offsets = 0,1,2,3
k = 4
pattern = 0,2,3,1
scheme = multi
max_periods_deferral = 0

[traffic]
kind = uniform
lo = 0
hi = 8

[channel]
epsilon = 0.1

[sim]
packets = 20000

[multi.0]
offsets = 0,1,2,3
k = 4
pattern = 0,2,3,1
scheme = first_to

[multi.1]
offsets = 5,6,7,8
k = 4
pattern = 0,2,3,1
scheme = first_to
";
    let scenario = write_scenario(dir.path(), "multi.cfg", text);
    let result = cgsim(&["simulate", "--scenario", &scenario]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let stdout = String::from_utf8_lossy(&result.stdout);
    let fields: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[1], "multi");
    assert_eq!(fields[2], "8", "T sums the members' allocations");
    assert_eq!(
        fields[16], "8",
        "tos_per_period sums the members' allocations"
    );

    let result = cgsim(&["wastage", "--scenario", &scenario]);
    assert!(result.status.success());
    // Uniform over slots 0..8: arrivals <= 3 use member 0 (wasting member 1's
    // 4 TOs plus the elapsed ones), arrivals <= 5 start member 1 cleanly.
    let value: f64 = String::from_utf8_lossy(&result.stdout)
        .trim()
        .parse()
        .unwrap();
    assert!(value > 4.0 && value < 8.0, "{value}");
}

#[test]
fn errors_exit_nonzero_with_context() {
    let dir = tempfile::tempdir().unwrap();

    let bad_epsilon = write_scenario(
        dir.path(),
        "bad1.cfg",
        &MINIMAL.replace("epsilon = 0.1", "epsilon = 1.5"),
    );
    let result = cgsim(&["simulate", "--scenario", &bad_epsilon]);
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("probability out of range"));

    let bad_k = write_scenario(dir.path(), "bad2.cfg", &MINIMAL.replace("k = 4", "k = 5"));
    let result = cgsim(&["simulate", "--scenario", &bad_k]);
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("K exceeds T"));

    let bad_key = write_scenario(
        dir.path(),
        "bad3.cfg",
        &MINIMAL.replace("period = 10", "periode = 10"),
    );
    let result = cgsim(&["simulate", "--scenario", &bad_key]);
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("line 2"));

    let result = cgsim(&["simulate"]);
    assert!(!result.status.success());

    let result = cgsim(&["dimension", "--scenario", &bad_k, "--target", "2.0"]);
    assert!(!result.status.success());
}

#[test]
fn infeasible_dimension_is_a_clean_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = MINIMAL
        .replace("offsets = 0,1,2,3", "offsets = 0")
        .replace("k = 4", "k = 1")
        .replace("kind = uniform\nlo = 0\nhi = 3", "kind = always\nslot = 0");
    let scenario = write_scenario(dir.path(), "dim.cfg", &text);
    let result = cgsim(&[
        "dimension",
        "--scenario",
        &scenario,
        "--target",
        "0.9999",
        "--r-max",
        "2",
    ]);
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("no TO count up to 2"));
}

#[test]
fn rv_aware_oracle_fallback_is_reported_but_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    // 17 TOs: beyond the enumeration bound, so the sweep's exact column is
    // empty and a note lands on stderr.
    let text = "\
[config]
period = 20
t = 17
k = 4
pattern = 0,2,3,1
scheme = flexible

[traffic]
kind = uniform
lo = 0
hi = 3

[channel]
epsilon = 0.1
decode = rv_aware

[sim]
packets = 5000
";
    let scenario = write_scenario(dir.path(), "rv.cfg", text);
    let result = cgsim(&[
        "sweep",
        "--scenario",
        &scenario,
        "--sweep",
        "channel.epsilon=0.1,0.2",
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(String::from_utf8_lossy(&result.stderr).contains("exact oracle unavailable"));
    let stdout = String::from_utf8_lossy(&result.stdout);
    for line in stdout.lines().skip(1) {
        assert!(line.ends_with(','), "exact column should be empty: {line}");
    }
}
