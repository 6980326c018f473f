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

//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! `8b` is expected to fail: the reference model's per-step error falls off
//! as δ³, outside the pinned slope window.

use qsim_harness::acceptance::{self, Tolerances};

fn check(id: &str) {
    let criterion = acceptance::find(id).expect("known criterion");
    let result = criterion.evaluate(&Tolerances::default());
    println!("{}", result.line());
    for m in &result.measurements {
        println!("    {} = {:?} ({}){}", m.name, m.value, m.bound, if m.passed { "" } else { "  <-- FAIL" });
    }
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_chsh() {
    check("1");
}

#[test]
fn criterion_02_tsirelson() {
    check("2");
}

#[test]
fn criterion_03_teleportation() {
    check("3");
}

#[test]
fn criterion_04_qft() {
    check("4");
}

#[test]
fn criterion_05_phase_estimation() {
    check("5");
}

#[test]
fn criterion_06_grover() {
    check("6");
}

#[test]
fn criterion_07_order_finding() {
    check("7");
}

#[test]
fn criterion_08a_trotter_commuting() {
    check("8a");
}

#[test]
fn criterion_08b_trotter_slope() {
    check("8b");
}

#[test]
fn criterion_08c_grover_hamiltonian() {
    check("8c");
}

#[test]
fn criterion_09_qec() {
    check("9");
}

#[test]
fn criterion_10_statistics() {
    check("10");
}

#[test]
fn criterion_11_qmc() {
    check("11");
}

#[test]
fn criterion_12_qrng() {
    check("12");
}

#[test]
fn every_criterion_has_a_test() {
    let ids: Vec<&str> = acceptance::criteria().iter().map(|c| c.id).collect();
    assert_eq!(ids, ["1", "2", "3", "4", "5", "6", "7", "8a", "8b", "8c", "9", "10", "11", "12"]);
}

#[test]
fn corrupted_tolerance_fails_only_its_criterion() {
    // cheap criteria keep this fast; the heavy ones are covered by the CLI test
    for id in ["4", "5", "8a", "8c", "12"] {
        let tol = Tolerances::corrupted(id).unwrap();
        let r = acceptance::find(id).unwrap().evaluate(&tol);
        assert!(!r.passed, "corrupting {id} should fail it");
        assert!(r.line().starts_with(&format!("FAIL [{id}]")));
        let other = if id == "4" { "8a" } else { "4" };
        assert!(acceptance::find(other).unwrap().evaluate(&tol).passed, "{other} unaffected by {id}");
    }
    assert!(Tolerances::corrupted("13").is_none());
}

#[test]
fn report_is_deterministic() {
    let tol = Tolerances::default();
    for id in ["3", "5", "10", "11"] {
        let c = acceptance::find(id).unwrap();
        assert_eq!(c.evaluate(&tol).json(), c.evaluate(&tol).json(), "criterion {id}");
    }
}
