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


//! Structural invariants, mostly as property tests.

use num_complex::Complex64;
use proptest::prelude::*;
use qsim_core::algorithms::PhaseEstimator;
use qsim_core::entangle::teleport;
use qsim_core::hamsim::{trotter_evolve, trotter_step, HamiltonianTerms, TrotterPlan};
use qsim_core::kernel;
use qsim_core::linalg::CMatrix;
use qsim_core::qec::{
    encode_bitflip, encode_shor9, shor9_correct, syndrome_distribution, PauliError,
};
use qsim_core::rng::shot_rng;
use qsim_core::statharness::trimmed_mean;
use qsim_core::StateVector;

fn hermitian(dim: usize, seed: u64) -> CMatrix {
    use rand::Rng;
    let mut rng = shot_rng(seed, "hermitian", dim as u64);
    let mut m = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in r..dim {
            let z = if r == c {
                Complex64::new(rng.random_range(-1.0..1.0), 0.0)
            } else {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            };
            m.set(r, c, z);
            m.set(c, r, z.conj());
        }
    }
    m
}

fn targets_strategy(qubits: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..qubits).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_flat_map(move |v| (1..=max_len).prop_map(move |k| v[..k].to_vec()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trimmed_mean_is_translation_equivariant(
        xs in prop::collection::vec(-1e3f64..1e3, 1..40),
        shift in -1e3f64..1e3,
        alpha in 0.0f64..0.45,
    ) {
        prop_assume!(trimmed_mean(&xs, alpha).is_ok());
        let moved: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let a = trimmed_mean(&xs, alpha).unwrap() + shift;
        let b = trimmed_mean(&moved, alpha).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn trimmed_mean_is_monotone(
        xs in prop::collection::vec(-1e3f64..1e3, 1..40),
        idx in any::<prop::sample::Index>(),
        bump in 0.0f64..100.0,
        alpha in 0.0f64..0.45,
    ) {
        prop_assume!(trimmed_mean(&xs, alpha).is_ok());
        let mut ys = xs.clone();
        let i = idx.index(ys.len());
        ys[i] += bump;
        prop_assert!(trimmed_mean(&ys, alpha).unwrap() >= trimmed_mean(&xs, alpha).unwrap() - 1e-9);
    }

    #[test]
    fn unitaries_preserve_norm(seed in any::<u64>(), targets in targets_strategy(5, 3)) {
        let u = hermitian(1 << targets.len(), seed).exp_i_hermitian(1.3).unwrap();
        let psi = StateVector::random(5, &mut shot_rng(seed, "psi", 0)).unwrap();
        let out = psi.apply_unitary(&u, &targets).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn teleportation_is_faithful(seed in any::<u64>()) {
        let psi = StateVector::random(1, &mut shot_rng(seed, "teleport-in", 0)).unwrap();
        let t = teleport(&psi, &mut shot_rng(seed, "teleport", 0)).unwrap();
        prop_assert!(t.bob.fidelity(&psi) >= 1.0 - 1e-10);
    }

    #[test]
    fn syndrome_hides_amplitudes(seed in any::<u64>(), mask in 0usize..8) {
        let a = StateVector::random(1, &mut shot_rng(seed, "a", 0)).unwrap();
        let b = StateVector::random(1, &mut shot_rng(seed, "b", 0)).unwrap();
        let flip = |s: StateVector| -> StateVector {
            (0..3).filter(|q| mask >> (2 - q) & 1 == 1).fold(s, |s, q| qsim_core::gates::pauli_x(q).apply(&s).unwrap())
        };
        let pa = syndrome_distribution(&flip(encode_bitflip(&a).unwrap()), [0, 1, 2]).unwrap();
        let pb = syndrome_distribution(&flip(encode_bitflip(&b).unwrap()), [0, 1, 2]).unwrap();
        for k in 0..4 {
            prop_assert!((pa[k] - pb[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn trotter_steps_are_unitary(seed in any::<u64>(), qubits in 1usize..=6, delta in 0.01f64..1.0) {
        let mut h = HamiltonianTerms::new(qubits).unwrap();
        for t in 0..3u64 {
            let k = 1 + (seed.wrapping_add(t) as usize % qubits.min(3));
            let targets: Vec<usize> = (0..k).map(|i| (i + t as usize) % qubits).collect();
            h.add_term(hermitian(1 << k, seed ^ t), targets).unwrap();
        }
        let u = trotter_step(&h, delta).unwrap().dense().unwrap();
        let defect = (&u.adjoint().matmul(&u) - &CMatrix::identity(u.dim()))
            .as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(defect < 1e-9);
    }

    #[test]
    fn trajectories_keep_their_norm(seed in any::<u64>(), m in 1usize..40) {
        let h = qsim_core::hamsim::reference_model();
        let psi = StateVector::random(2, &mut shot_rng(seed, "traj", 0)).unwrap();
        let traj = trotter_evolve(&h, &TrotterPlan::new(2.0, m).unwrap(), &psi).unwrap();
        for s in &traj {
            prop_assert!((s.norm_sqr().sqrt() - 1.0).abs() < 1e-8 * m as f64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn parallel_kernel_is_bit_identical(seed in any::<u64>(), targets in targets_strategy(14, 3), control in 0usize..14) {
        let psi = StateVector::random(14, &mut shot_rng(seed, "kernel", 0)).unwrap();
        let u = hermitian(1 << targets.len(), seed).exp_i_hermitian(0.7).unwrap();
        let controls: Vec<usize> = if targets.contains(&control) { vec![] } else { vec![control] };
        let a = kernel::apply_sequential(14, psi.amps(), &u, &targets, &controls);
        let b = kernel::apply_parallel(14, psi.amps(), &u, &targets, &controls);
        prop_assert!(a == b);
    }
}

#[test]
fn exact_phases_are_recovered_deterministically() {
    for b in 1..=8usize {
        let scale = (b as f64).exp2();
        for k in 0..1usize << b {
            let phi = k as f64 / scale;
            let u = CMatrix::diagonal(&[
                Complex64::new(1.0, 0.0),
                Complex64::from_polar(1.0, std::f64::consts::TAU * phi),
            ]);
            let est = PhaseEstimator::prepare(&u, &StateVector::basis_state(1, 1).unwrap(), b).unwrap();
            assert!((est.distribution()[k] - 1.0).abs() < 1e-9, "b={b} k={k}");
            for shot in 0..4 {
                assert_eq!(est.sample(&mut shot_rng(k as u64, "exact", shot)).unwrap().outcome, k);
            }
        }
    }
}

#[test]
fn shor_code_corrects_every_single_error() {
    for trial in 0..20u64 {
        let logical = StateVector::random(1, &mut shot_rng(trial, "shor-logical", 0)).unwrap();
        let code = encode_shor9(&logical).unwrap();
        for err in PauliError::ALL {
            for q in 0..9 {
                let damaged = err.apply(&code, q).unwrap();
                let fixed = shor9_correct(&damaged, &mut shot_rng(trial, "shor-fix", q as u64)).unwrap();
                assert!(fixed.fidelity(&code) >= 1.0 - 1e-9, "{err:?} on qubit {q}");
            }
        }
    }
}

#[test]
fn syndrome_measurement_preserves_codewords_with_one_flip() {
    for seed in 0..10u64 {
        let code = encode_bitflip(&StateVector::random(1, &mut shot_rng(seed, "cw", 0)).unwrap()).unwrap();
        for q in [None, Some(0), Some(1), Some(2)] {
            let s = match q {
                Some(q) => qsim_core::gates::pauli_x(q).apply(&code).unwrap(),
                None => code.clone(),
            };
            let (_, post) = qsim_core::qec::syndrome_measure(&s, &mut shot_rng(seed, "sm", 0)).unwrap();
            assert!((post.fidelity(&s) - 1.0).abs() < 1e-12);
        }
    }
}
