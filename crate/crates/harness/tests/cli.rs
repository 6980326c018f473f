// Copyright 2026 The qsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! End-to-end tests of the `qsim` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use qsim_core::algorithms::qft;
use qsim_core::gates::Circuit;
use qsim_core::hamsim::HamiltonianTerms;
use qsim_core::linalg::paulis;
use qsim_core::StateVector;

fn qsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsim"))
        .args(args)
        .env_remove("QSIM_MAX_QUBITS")
        .output()
        .expect("spawn qsim")
}

fn rows(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn metric<'a>(rows: &'a [Value], name: &str) -> &'a Value {
    rows.iter().find(|r| r["metric"] == name).unwrap_or_else(|| panic!("no metric {name}"))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn unknown_experiment_is_rejected() {
    let out = qsim(&["--experiment", "warp-drive"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_experiment_is_rejected() {
    assert_eq!(qsim(&[]).status.code(), Some(2));
}

#[test]
fn violated_precondition_exits_2_and_names_it() {
    let out = qsim(&["--experiment", "stats-bound", "--epsilon", "0.3", "--alpha", "0.1"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("alpha") || stderr(&out).contains("α"), "{}", stderr(&out));

    let out = qsim(&["--experiment", "grover", "--n", "6"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn seed_is_echoed_on_stderr() {
    let out = qsim(&["--experiment", "bell", "--shots", "10", "--seed", "7"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("seed = 7"));
    assert!(rows(&out).iter().all(|r| r["seed"] == 7));
}

#[test]
fn chsh_reports_tsirelson_reference() {
    let out = qsim(&["--experiment", "chsh", "--shots", "20000"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = rows(&out);
    let row = metric(&rows, "chsh_value");
    let reference = row["reference"].as_f64().unwrap();
    assert!((reference - 2.8284271).abs() < 1e-7);
    let (v, se) = (row["value"].as_f64().unwrap(), row["stderr"].as_f64().unwrap());
    assert!((v - reference).abs() <= 4.0 * se);
}

#[test]
fn chsh_raw_rows_carry_each_shot() {
    let out = qsim(&["--experiment", "chsh", "--shots", "50", "--raw"]);
    assert!(out.status.success());
    let rows = rows(&out);
    assert_eq!(rows.len(), 50);
    for (j, r) in rows.iter().enumerate() {
        assert_eq!(r["shot"], j as u64);
        assert!(r["alice"] == 1 || r["alice"] == -1);
        assert!(r["bob"] == 1 || r["bob"] == -1);
    }
}

#[test]
fn grover_on_four_items_always_succeeds() {
    let out = qsim(&["--experiment", "grover", "--n", "4", "--m", "1", "--shots", "100"]);
    assert!(out.status.success());
    assert_eq!(metric(&rows(&out), "success_rate")["value"].as_f64(), Some(1.0));
}

#[test]
fn qec_sweep_without_noise_never_fails() {
    let out = qsim(&["--experiment", "qec-sweep", "--p", "0", "--shots", "500"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(metric(&rows(&out), "logical_error_rate")["value"].as_f64(), Some(0.0));
}

#[test]
fn qec_sweep_csv_has_one_line_per_p() {
    let out = qsim(&["--experiment", "qec-sweep", "--p", "0.05,0.1", "--shots", "2000", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,shots,failures,rate,predicted,stderr"));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 2);
    assert!(body[0].starts_with("0.05,2000,"));
}

#[test]
fn default_csv_uses_row_columns() {
    let out = qsim(&["--experiment", "grover-ham", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("experiment,seed,params,metric,value,stderr,reference"), "{text}");
}

#[test]
fn rows_validate_against_schema() {
    let schema: Value = serde_json::from_str(qsim_harness::row::RESULT_ROW_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let runs: &[&[&str]] = &[
        &["--experiment", "bell", "--shots", "20"],
        &["--experiment", "chsh", "--shots", "200"],
        &["--experiment", "teleport", "--shots", "20"],
        &["--experiment", "qft"],
        &["--experiment", "phase-est", "--shots", "50"],
        &["--experiment", "grover", "--shots", "20"],
        &["--experiment", "count", "--shots", "20"],
        &["--experiment", "order-find", "--x", "7", "--modulus", "15"],
        &["--experiment", "trotter"],
        &["--experiment", "grover-ham"],
        &["--experiment", "qec-sweep", "--shots", "200"],
        &["--experiment", "qrng", "--shots", "200"],
        &["--experiment", "qmc", "--shots", "200"],
        &["--experiment", "stats-bound", "--shots", "200"],
    ];
    for args in runs {
        let out = qsim(args);
        let rows = rows(&out);
        assert!(!rows.is_empty(), "{args:?}");
        for r in &rows {
            if let Err(e) = validator.validate(r) {
                panic!("{args:?}: {r} violates the schema: {e}");
            }
        }
    }
    let bad: Value = serde_json::json!({"experiment": "bell", "seed": 1, "params": {}, "metric": "x", "value": 1.0, "extra": 2});
    assert!(!validator.is_valid(&bad));
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let args = ["--experiment", "qec-sweep", "--shots", "3000", "--seed", "99"];
    let a = qsim(&args);
    let b = qsim(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = qsim(&["--experiment", "qec-sweep", "--shots", "3000", "--seed", "100"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn thread_count_does_not_change_results() {
    let one = qsim(&["--experiment", "qrng", "--shots", "5000", "--threads", "1"]);
    let four = qsim(&["--experiment", "qrng", "--shots", "5000", "--threads", "4"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn assert_flag_turns_failed_checks_into_exit_3() {
    // the reference model's per-step slope is about 3
    let out = qsim(&["--experiment", "trotter", "--assert"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("per_step_slope"));
    assert!(qsim(&["--experiment", "trotter"]).status.success());
    assert!(qsim(&["--experiment", "grover-ham", "--assert"]).status.success());
}

#[test]
fn qubit_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qsim"))
        .args(["--experiment", "qft", "--bits", "8"])
        .env("QSIM_MAX_QUBITS", "6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("cap is 6"));
}

#[test]
fn hamiltonian_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let h = HamiltonianTerms::new(2)
        .unwrap()
        .with_term(paulis::z().kron(&paulis::z()).scale_real(0.7), vec![0, 1])
        .unwrap()
        .with_term(paulis::z().scale_real(-0.4), vec![1])
        .unwrap();
    std::fs::write(&path, h.to_json()).unwrap();
    let out = qsim(&["--experiment", "trotter", "--hamiltonian", path.to_str().unwrap(), "--assert"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = rows(&out);
    assert_eq!(metric(&rows, "terms_commute")["value"].as_f64(), Some(1.0));
    assert!(metric(&rows, "terminal_error")["value"].as_f64().unwrap() < 1e-9);

    std::fs::write(&path, r#"{"qubits": 2, "terms": [], "extra": 1}"#).unwrap();
    let out = qsim(&["--experiment", "trotter", "--hamiltonian", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn dump_qft(dir: &Path, input: &StateVector) -> (StateVector, Circuit) {
    let state_in = dir.join("in.json");
    let state_out = dir.join("out.json");
    let circuit = dir.join("circuit.json");
    std::fs::write(&state_in, input.to_json()).unwrap();
    let out = qsim(&[
        "--experiment",
        "qft",
        "--state",
        state_in.to_str().unwrap(),
        "--dump-state",
        state_out.to_str().unwrap(),
        "--dump-circuit",
        circuit.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let s = StateVector::from_json(&std::fs::read_to_string(state_out).unwrap()).unwrap();
    let c = Circuit::from_json(input.qubits(), &std::fs::read_to_string(circuit).unwrap()).unwrap();
    (s, c)
}

#[test]
fn qft_state_and_circuit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = StateVector::basis_state(3, 0).unwrap();
    let (out, circuit) = dump_qft(dir.path(), &input);
    assert!(out.fidelity(&StateVector::uniform(3).unwrap()) > 1.0 - 1e-12);
    let diff = circuit.dense_matrix().unwrap().max_abs_diff(&qft(3).unwrap().dense_matrix().unwrap());
    assert!(diff < 1e-12);
}

#[test]
fn acceptance_flag_reports_every_criterion() {
    let out = qsim(&["--acceptance"]);
    let lines: Vec<Value> = rows(&out);
    assert_eq!(lines.len(), 14);
    let failed: Vec<&str> = lines
        .iter()
        .filter(|l| l["passed"] == false)
        .map(|l| l["criterion"].as_str().unwrap())
        .collect();
    assert_eq!(out.status.code(), Some(if failed.is_empty() { 0 } else { 3 }));
    assert!(stderr(&out).contains("PASS [1]"));
}

#[test]
fn corrupted_tolerance_is_caught() {
    let out = qsim(&["--acceptance", "--corrupt-tolerance", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("FAIL [4] QFT against the dense DFT"));
    assert_eq!(qsim(&["--acceptance", "--corrupt-tolerance", "99"]).status.code(), Some(2));
    assert_eq!(qsim(&["--experiment", "qft", "--corrupt-tolerance", "4"]).status.code(), Some(2));
}
