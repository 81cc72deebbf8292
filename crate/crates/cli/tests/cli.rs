//! End-to-end runs of the `taubessel` binary.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use taubessel_core::problems::{reference_tables, At, Quantity, Source};
use taubessel_core::scalar::parse_rational;
use taubessel_core::{MpFloat, RealScalar, Scalar};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taubessel")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Rows of a CSV document as string cells, header first.
fn cells(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let rows = cells(csv);
    let j = rows[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[j].clone()).collect()
}

fn f64_of(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn troesch_value_at_one_half() {
    let out = run(&["solve", "--problem", "troesch", "--n", "10", "--param", "gamma=0.5", "--points", "0.5"]);
    assert_eq!(code(&out), 0);
    let value = &column(&stdout(&out), "value")[0];
    assert!(value.starts_with("0.48454717144"), "{value}");
}

#[test]
fn linear_troesch_is_the_identity() {
    let out = run(&["solve", "--problem", "troesch", "--param", "gamma=0", "--samples", "6"]);
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    for (x, y) in column(&csv, "x").iter().zip(column(&csv, "value")) {
        assert!((f64_of(x) - f64_of(&y)).abs() < 1e-40, "{x} vs {y}");
    }
}

#[test]
fn lane_emden_type_reproduces_exp_x2() {
    let points = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
    let out = run(&["solve", "--problem", "lane-emden-type", "--n", "40", "--precision", "60", "--points", points]);
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    for (x, y) in column(&csv, "x").iter().zip(column(&csv, "value")) {
        let x = MpFloat::parse_decimal(x, 80).unwrap();
        let exact = (x.clone() * &x).exp();
        let y = MpFloat::parse_decimal(&y, 80).unwrap();
        let rel = ((y - &exact) / &exact).abs().to_f64_lossy();
        assert!(rel < 1e-16, "relative error {rel:e}");
    }
}

#[test]
fn squeezing_flow_columns() {
    let out = run(&["solve", "--problem", "squeezing-flow", "--samples", "3"]);
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    assert_eq!(cells(&csv)[0], ["x", "f", "f'", "theta", "residual_f", "residual_theta"]);
    assert_eq!(column(&csv, "f")[0], "0.1");
    assert_eq!(column(&csv, "theta")[2], "0");
    assert!(String::from_utf8_lossy(&out.stderr).contains("Nu = 1.0568041567724814"));
}

#[test]
fn output_is_deterministic_with_lf_endings() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("one.csv"), dir.path().join("two.csv")];
    for p in &paths {
        let out = run(&["solve", "--problem", "abel", "--samples", "5", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    let (a, b) = (fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r') && a.ends_with(b"\n"));
}

#[test]
fn decimals_round_trip_at_the_requested_precision() {
    let out = run(&["solve", "--problem", "troesch", "--precision", "40", "--samples", "4"]);
    let csv = stdout(&out);
    for v in column(&csv, "value").iter().chain(&column(&csv, "residual")) {
        let parsed = MpFloat::parse_decimal(v, 40).unwrap();
        assert_eq!(&parsed.to_decimal(40), v);
        let digits = v.split(['e', 'E']).next().unwrap().chars().filter(char::is_ascii_digit).collect::<String>();
        assert!(v == "0" || digits.trim_start_matches('0').len() <= 40, "{v}");
    }
}

#[test]
fn json_output_carries_the_solve_metadata() {
    let out = run(&["solve", "--problem", "troesch", "--samples", "3", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["problem"], "troesch");
    assert_eq!(doc["converged"], true);
    assert_eq!(doc["columns"][1], "value");
    assert_eq!(doc["coefficients"][0].as_array().unwrap().len(), 11);
    assert!(doc["comparison"].as_array().unwrap().iter().any(|c| c["table"] == "table7" && c["pass"] == true));
}

#[test]
fn a_converged_state_restarts_without_iterations() {
    let out = run(&["solve", "--problem", "abel", "--format", "json", "--samples", "2"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let coeffs: Vec<String> =
        doc["coefficients"][0].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let dir = tempfile::tempdir().unwrap();
    let init = dir.path().join("init.txt");
    fs::write(&init, coeffs.join("\n")).unwrap();
    let arg = format!("file:{}", init.display());
    let out = run(&["solve", "--problem", "abel", "--format", "json", "--samples", "2", "--init", &arg]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["iterations"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["solve", "--problem", "abel", "--max-iter", "1"])), 2);
    assert_eq!(code(&run(&["solve", "--problem", "abel", "--n", "1"])), 3);
    assert_eq!(code(&run(&["solve", "--problem", "abel", "--param", "gamma=1"])), 3);
    assert_eq!(code(&run(&["solve", "--problem", "troesch", "--points", "2"])), 3);
    assert_eq!(code(&run(&["solve", "--problem", "troesch", "--precision", "10"])), 3);
    assert_eq!(code(&run(&["solve", "--problem", "nope"])), 3);
    assert_eq!(code(&run(&["solve", "--problem", "troesch", "--init", "file:/nonexistent"])), 3);
    assert_eq!(code(&run(&["sweep", "--problem", "troesch", "--sweep", "gamma=0:1"])), 3);
    assert_eq!(code(&run(&["sweep", "--problem", "troesch", "--sweep", "beta=0:1:2"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn sweep_writes_one_file_per_value_and_an_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep", "--problem", "squeezing-flow", "--sweep", "A=-0.5:0.5:3", "--samples", "5", "--deriv", "--out",
        dir.path().to_str().unwrap(), "--jobs", "2",
    ]);
    assert_eq!(code(&out), 0);
    let index = fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert_eq!(column(&index, "A"), ["-0.5", "0", "0.5"]);
    assert!(column(&index, "status").iter().all(|s| s == "converged"));
    for file in column(&index, "file") {
        let csv = fs::read_to_string(dir.path().join(file)).unwrap();
        let df = column(&csv, "f'");
        for end in [&df[0], &df[4]] {
            assert!(f64_of(end).abs() < 1e-40, "f' = {end}");
        }
    }
}

#[test]
fn sweeping_the_prandtl_number_reproduces_the_nusselt_table() {
    let table = reference_tables().into_iter().find(|t| t.id == "table3").unwrap();
    let mut expected = Vec::new();
    for row in table.select(Source::Present, &Quantity::Nusselt) {
        let At::Params(p) = &row.at else { unreachable!() };
        if p["Ec"] == "0.2" && p["delta"] == "0.1" {
            expected.push((p["Pr"].clone(), row.value.clone()));
        }
    }
    assert!(expected.len() >= 3);
    let list: Vec<&str> = expected.iter().map(|(pr, _)| pr.as_str()).collect();
    let dir = tempfile::tempdir().unwrap();
    let sweep = format!("Pr={}", list.join(","));
    let out = run(&[
        "sweep", "--problem", "squeezing-flow", "--sweep", &sweep, "--param", "Ec=0.2", "--param", "delta=0.1",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let index = fs::read_to_string(dir.path().join("index.csv")).unwrap();
    for ((_, printed), nu) in expected.iter().zip(column(&index, "nusselt")) {
        let diff = MpFloat::parse_decimal(&nu, 60).unwrap() - MpFloat::from_rational(&parse_rational(printed).unwrap(), 60);
        assert!(diff.abs().to_f64_lossy() < 1e-10, "Nu {nu} vs {printed}");
    }
}

#[test]
fn a_single_value_sweep_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep", "--problem", "troesch", "--sweep", "gamma=0.5:0.5:1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let swept = fs::read_to_string(dir.path().join("troesch-gamma-000.csv")).unwrap();
    let solved = stdout(&run(&["solve", "--problem", "troesch", "--param", "gamma=0.5"]));
    assert_eq!(swept, solved);
}

#[test]
fn matrices_are_exact() {
    let csv = stdout(&run(&["matrices", "--n", "2", "--which", "m"]));
    assert_eq!(csv, "row,0,1,2\n0,1/1,0/1,-1/4\n1,0/1,1/2,0/1\n2,0/1,0/1,1/8\n");
    let d = stdout(&run(&["matrices", "--n", "2", "--which", "d", "--format", "json"]));
    let doc: Value = serde_json::from_str(&d).unwrap();
    assert_eq!(doc["matrix"], "d");
    // Q_1' = 1/2 = (Q_0 + 2 Q_2) / 2 and Q_2' = x/4 = Q_1 / 2; cells follow the row label
    assert_eq!(doc["rows"][1], serde_json::json!(["1", "1/2", "0/1", "1/1"]));
    assert_eq!(doc["rows"][2], serde_json::json!(["2", "0/1", "1/2", "0/1"]));
}

#[test]
fn product_matrix_of_one_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    // 1 = Q_0 + 2 Q_2 at N = 2
    fs::write(&path, "1\n0\n2\n").unwrap();
    let csv = stdout(&run(&["matrices", "--n", "2", "--product-from", path.to_str().unwrap()]));
    assert_eq!(csv, "row,0,1,2\n0,1/1,0/1,0/1\n1,0/1,1/1,0/1\n2,0/1,0/1,1/1\n");
}

#[test]
fn approx_projects_polynomials_and_functions() {
    let csv = stdout(&run(&["approx", "--n", "2", "--function", "polynomial:0,1"]));
    assert_eq!(column(&csv, "coefficient"), ["0", "2", "0"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sin.csv");
    let out = run(&["approx", "--n", "10", "--function", "sin", "--emit", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(column(&fs::read_to_string(path).unwrap(), "n").len(), 11);
    assert_eq!(code(&run(&["approx", "--function", "cosh"])), 3);
}

#[test]
fn verify_filters_by_criterion() {
    let out = run(&["verify", "--filter", "table7"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("PASS table7"));
}

#[test]
fn verify_names_a_corrupted_table() {
    let mut tables = reference_tables();
    let t = tables.iter_mut().find(|t| t.id == "table7").unwrap();
    let row = t.rows.iter_mut().find(|r| r.source == Source::Present).unwrap();
    row.value = "0.5".into();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("refs.json");
    fs::write(&path, serde_json::to_string(&tables).unwrap()).unwrap();
    let out = run(&["verify", "--filter", "table7", "--references", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("FAIL table7"));
}

/// The full suite: every criterion reports, and only the two criteria that
/// are stricter than the published results fail.
#[test]
fn verify_runs_every_criterion() {
    let out = run(&["verify"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    let verdicts: Vec<&str> = text.lines().filter(|l| !l.starts_with(' ')).collect();
    assert_eq!(verdicts.len(), 7, "{text}");
    let failed: Vec<&str> = verdicts.iter().filter(|l| l.starts_with("FAIL")).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(failed, ["table4", "table5"], "{text}");
}
