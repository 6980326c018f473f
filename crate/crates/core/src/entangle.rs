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

//! Bell states and the entanglement experiments: anti-correlation of the
//! singlet, teleportation, and the CHSH correlator.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, QsimError, Result};
use crate::gates::{cnot, hadamard, pauli_x, pauli_z, Circuit};
use crate::linalg::{paulis, CMatrix, DERIVED_TOL};
use crate::parallel::{try_map_indexed, Exec};
use crate::qstate::{Observable, QuantumState, StateVector};
use crate::rng::StreamKey;

/// Real unit vector `(a_x, a_y, a_z)` selecting the spin observable `a·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinAxis {
    ax: f64,
    ay: f64,
    az: f64,
}

impl SpinAxis {
    pub fn new(ax: f64, ay: f64, az: f64) -> Result<Self> {
        let n2 = ax * ax + ay * ay + az * az;
        if !n2.is_finite() || (n2 - 1.0).abs() > 1e-12 {
            return validation(format!("spin axis has squared length {n2}"));
        }
        Ok(SpinAxis { ax, ay, az })
    }

    /// Uniform on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        let (ax, ay) = (r * phi.cos(), r * phi.sin());
        // renormalize away rounding
        let n = (ax * ax + ay * ay + z * z).sqrt();
        SpinAxis {
            ax: ax / n,
            ay: ay / n,
            az: z / n,
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.ax, self.ay, self.az]
    }

    /// `M = a_x σ_x + a_y σ_y + a_z σ_z`
    pub fn matrix(&self) -> CMatrix {
        let m = &paulis::x().scale_real(self.ax) + &paulis::y().scale_real(self.ay);
        &m + &paulis::z().scale_real(self.az)
    }

    pub fn observable(&self) -> Result<Observable> {
        Observable::new(self.matrix())
    }
}

/// Alice measures `x1` or `x2`, Bob measures `x3` or `x4`; all square to `I`.
#[derive(Debug, Clone)]
pub struct ChshSetting {
    pub x1: Observable,
    pub x2: Observable,
    pub x3: Observable,
    pub x4: Observable,
}

impl ChshSetting {
    pub fn new(x1: Observable, x2: Observable, x3: Observable, x4: Observable) -> Result<Self> {
        for (name, o) in [("X1", &x1), ("X2", &x2), ("X3", &x3), ("X4", &x4)] {
            if o.dim() != 2 {
                return domain(format!("{name} is not a single-qubit observable"));
            }
            if o.matrix().matmul(o.matrix()).max_abs_diff(&CMatrix::identity(2)) > DERIVED_TOL {
                return validation(format!("{name} does not square to the identity"));
            }
        }
        Ok(ChshSetting { x1, x2, x3, x4 })
    }

    /// `X₁ = σ_z`, `X₂ = σ_x`, `X₃ = -(σ_z + σ_x)/√2`, `X₄ = (σ_z - σ_x)/√2`.
    pub fn standard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = paulis::z();
        let x = paulis::x();
        let obs = |m: CMatrix| Observable::new(m).expect("standard CHSH observable");
        ChshSetting {
            x1: obs(z.clone()),
            x2: obs(x.clone()),
            x3: obs((&z + &x).scale_real(-s)),
            x4: obs((&z - &x).scale_real(s)),
        }
    }

    /// Alice's and Bob's observables for correlator `pair` (0..4) in the order
    /// `X₁X₃, X₂X₃, X₂X₄, X₁X₄`, with the sign it carries in the CHSH sum.
    pub fn pair(&self, pair: usize) -> (&Observable, &Observable, f64) {
        match pair {
            0 => (&self.x1, &self.x3, 1.0),
            1 => (&self.x2, &self.x3, 1.0),
            2 => (&self.x2, &self.x4, 1.0),
            3 => (&self.x1, &self.x4, -1.0),
            _ => panic!("CHSH pair index {pair} out of range"),
        }
    }
}

pub const PAIR_LABELS: [&str; 4] = ["X1X3", "X2X3", "X2X4", "X1X4"];

/// Output of `H` on the first qubit then CNOT, on input `|x₁x₂⟩`.
pub fn bell_state(x1: u8, x2: u8) -> Result<StateVector> {
    if x1 > 1 || x2 > 1 {
        return domain("Bell state labels are bits");
    }
    let mut c = Circuit::new(2)?;
    c.push(hadamard(0))?.push(cnot(0, 1)?)?;
    c.run(&StateVector::basis_state(2, ((x1 as usize) << 1) | x2 as usize)?)
}

/// `(|01⟩ - |10⟩)/√2`
pub fn singlet() -> StateVector {
    bell_state(1, 1).expect("singlet")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinPair {
    pub alice: i8,
    pub bob: i8,
}

fn sign_of(eigenvalue: f64) -> i8 {
    if eigenvalue >= 0.0 {
        1
    } else {
        -1
    }
}

/// Measure `M ⊗ I` on the singlet, then `I ⊗ M` on the collapsed state.
pub fn anticorrelation_experiment(axis: SpinAxis, shots: usize, seed: u64) -> Result<Vec<SpinPair>> {
    let m = axis.observable()?;
    let id = Observable::new(CMatrix::identity(2))?;
    let alice_obs = m.tensor(&id)?;
    let bob_obs = id.tensor(&m)?;
    let psi = singlet();
    let key = StreamKey::new(seed, "anticorrelation");
    try_map_indexed(Exec::default(), shots, |shot| {
        let mut rng = key.shot(shot as u64);
        let a = psi.measure_observable(&alice_obs, &mut rng)?;
        let b = a.post.measure_observable(&bob_obs, &mut rng)?;
        Ok(SpinPair {
            alice: sign_of(a.eigenvalue),
            bob: sign_of(b.eigenvalue),
        })
    })
}

/// Result of one teleportation run.
#[derive(Debug, Clone)]
pub struct Teleportation {
    /// Bob's qubit after the correction.
    pub bob: StateVector,
    /// Bob's qubit before the correction.
    pub uncorrected: StateVector,
    /// Alice's measured bits `(qubit 0, qubit 1)`.
    pub bits: [u8; 2],
}

/// Bob's qubit out of a three-qubit state whose first two qubits are the
/// classical basis state `|m₀m₁⟩`.
fn third_qubit(state: &StateVector, m0: u8, m1: u8) -> Result<StateVector> {
    let base = ((m0 as usize) << 2) | ((m1 as usize) << 1);
    StateVector::normalized(1, vec![state.amp(base), state.amp(base | 1)])
}

/// Three-qubit teleportation of `psi` from qubit 0 to qubit 2.
///
/// Correction on Bob's qubit: `00 → I`, `01 → σ_x`, `10 → σ_z`,
/// `11 → σ_x` then `σ_z`.
pub fn teleport<R: Rng + ?Sized>(psi: &StateVector, rng: &mut R) -> Result<Teleportation> {
    if psi.qubits() != 1 {
        return domain("teleportation input must be a single qubit");
    }
    let phi0 = psi.tensor(&bell_state(0, 0)?)?;
    let mut c = Circuit::new(3)?;
    c.push(cnot(0, 1)?)?.push(hadamard(0))?;
    let phi2 = c.run(&phi0)?;
    let m = phi2.measure_qubits(&[0, 1], rng)?;
    let (m0, m1) = (m.bits[0], m.bits[1]);
    let uncorrected = third_qubit(&m.post, m0, m1)?;
    let mut bob = uncorrected.clone();
    if m1 == 1 {
        bob = pauli_x(0).apply(&bob)?;
    }
    if m0 == 1 {
        bob = pauli_z(0).apply(&bob)?;
    }
    Ok(Teleportation {
        bob,
        uncorrected,
        bits: [m0, m1],
    })
}

/// `E(X₁X₃) + E(X₂X₃) + E(X₂X₄) − E(X₁X₄)` with tensor-product observables.
pub fn chsh_quantum_value<S: QuantumState>(state: &S, setting: &ChshSetting) -> Result<f64> {
    if state.qubits() != 2 {
        return domain(format!("CHSH needs two qubits, got {}", state.qubits()));
    }
    (0..4).try_fold(0.0, |acc, pair| {
        let (a, b, sign) = setting.pair(pair);
        Ok(acc + sign * state.expectation(&a.tensor(b)?)?)
    })
}

/// All 16 deterministic `±1` assignments `(a₁, a₂, b₃, b₄)` with their CHSH
/// combination.
pub fn classical_chsh_values() -> Vec<([i8; 4], i32)> {
    let mut out = Vec::with_capacity(16);
    for bits in 0..16u8 {
        let v = |k: u8| if (bits >> k) & 1 == 1 { 1i8 } else { -1 };
        let (a1, a2, b3, b4) = (v(3), v(2), v(1), v(0));
        let s = (a1 * b3 + a2 * b3 + a2 * b4 - a1 * b4) as i32;
        out.push(([a1, a2, b3, b4], s));
    }
    out
}

/// One shot of the CHSH experiment.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChshShot {
    pub shot: u64,
    pub setting: String,
    pub alice: i8,
    pub bob: i8,
}

#[derive(Debug, Clone)]
pub struct ChshEstimate {
    pub value: f64,
    /// Monte Carlo standard error of `value`.
    pub stderr: f64,
    pub correlators: [f64; 4],
    pub counts: [usize; 4],
    pub shots: Vec<ChshShot>,
}

/// Sampled CHSH value on the singlet with the standard setting.
pub fn chsh_experiment(shots: usize, seed: u64) -> Result<ChshEstimate> {
    chsh_experiment_with(&singlet(), &ChshSetting::standard(), shots, seed)
}

/// Per shot: draw one of the four pairs uniformly, measure Alice's
/// observable then Bob's, record the product.
pub fn chsh_experiment_with(
    state: &StateVector,
    setting: &ChshSetting,
    shots: usize,
    seed: u64,
) -> Result<ChshEstimate> {
    if shots == 0 {
        return Err(QsimError::NoData("CHSH experiment with zero shots".into()));
    }
    if state.qubits() != 2 {
        return domain("CHSH needs two qubits");
    }
    let id = Observable::new(CMatrix::identity(2))?;
    let lifted: Vec<(Observable, Observable)> = (0..4)
        .map(|p| {
            let (a, b, _) = setting.pair(p);
            Ok((a.tensor(&id)?, id.tensor(b)?))
        })
        .collect::<Result<_>>()?;
    let key = StreamKey::new(seed, "chsh");
    let rows = try_map_indexed(Exec::default(), shots, |shot| {
        let mut rng = key.shot(shot as u64);
        let pair = rng.random_range(0..4usize);
        let (alice_obs, bob_obs) = &lifted[pair];
        let a = state.measure_observable(alice_obs, &mut rng)?;
        let b = a.post.measure_observable(bob_obs, &mut rng)?;
        Ok::<_, QsimError>((pair, sign_of(a.eigenvalue), sign_of(b.eigenvalue)))
    })?;

    let mut sums = [0i64; 4];
    let mut counts = [0usize; 4];
    let mut shot_rows = Vec::with_capacity(shots);
    for (shot, &(pair, a, b)) in rows.iter().enumerate() {
        sums[pair] += (a * b) as i64;
        counts[pair] += 1;
        shot_rows.push(ChshShot {
            shot: shot as u64,
            setting: PAIR_LABELS[pair].to_string(),
            alice: a,
            bob: b,
        });
    }
    if let Some(p) = counts.iter().position(|&c| c == 0) {
        return Err(QsimError::NoData(format!("pair {} never sampled", PAIR_LABELS[p])));
    }
    let mut correlators = [0.0; 4];
    let mut value = 0.0;
    let mut var = 0.0;
    for p in 0..4 {
        let e = sums[p] as f64 / counts[p] as f64;
        correlators[p] = e;
        value += setting.pair(p).2 * e;
        // products are ±1, so Var = 1 - E²
        var += (1.0 - e * e) / counts[p] as f64;
    }
    Ok(ChshEstimate {
        value,
        stderr: var.sqrt(),
        correlators,
        counts,
        shots: shot_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::DensityMatrix;
    use crate::rng::shot_rng;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bell_table() {
        let s = FRAC_1_SQRT_2;
        let table = [
            ((0, 0), [s, 0.0, 0.0, s]),
            ((0, 1), [0.0, s, s, 0.0]),
            ((1, 0), [s, 0.0, 0.0, -s]),
            ((1, 1), [0.0, s, -s, 0.0]),
        ];
        for ((x1, x2), amps) in table {
            let b = bell_state(x1, x2).unwrap();
            for (z, e) in b.amps().iter().zip(amps) {
                assert!((z - c(e)).norm() < 1e-15, "({x1},{x2})");
            }
        }
    }

    #[test]
    fn bell_states_are_orthonormal() {
        let all: Vec<_> = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(a, b)| bell_state(a, b).unwrap())
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                let ip = all[i].inner(&all[j]).norm();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn z_axis_anticorrelation() {
        let axis = SpinAxis::new(0.0, 0.0, 1.0).unwrap();
        let pairs = anticorrelation_experiment(axis, 200, 5).unwrap();
        assert!(pairs.iter().all(|p| p.alice == -p.bob));
        assert!(pairs.iter().any(|p| p.alice == 1) && pairs.iter().any(|p| p.alice == -1));
    }

    #[test]
    fn axis_validation() {
        assert!(SpinAxis::new(1.0, 1.0, 0.0).is_err());
        let a = SpinAxis::random(&mut shot_rng(0, "axis", 0));
        let [x, y, z] = a.components();
        assert!((x * x + y * y + z * z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn teleport_zero_in_every_branch() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let mut seen = [false; 4];
        for shot in 0..64 {
            let t = teleport(&zero, &mut shot_rng(2, "tp", shot)).unwrap();
            assert!(t.bob.approx_eq(&zero));
            seen[(t.bits[0] * 2 + t.bits[1]) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn teleport_branch_01_needs_bit_flip() {
        let psi = StateVector::qubit(c(0.6), Complex64::new(0.0, 0.8)).unwrap();
        let flipped = StateVector::qubit(psi.amp(1), psi.amp(0)).unwrap();
        for shot in 0..64 {
            let t = teleport(&psi, &mut shot_rng(3, "tp", shot)).unwrap();
            if t.bits == [0, 1] {
                assert!(t.uncorrected.approx_eq(&flipped));
                assert!(t.bob.approx_eq(&psi));
                return;
            }
        }
        panic!("branch 01 never observed");
    }

    #[test]
    fn chsh_values() {
        let setting = ChshSetting::standard();
        let v = chsh_quantum_value(&singlet(), &setting).unwrap();
        assert!((v - 2.0 * SQRT_2).abs() < 1e-12);
        let v00 = chsh_quantum_value(&StateVector::basis_state(2, 0).unwrap(), &setting).unwrap();
        assert!((v00 + SQRT_2).abs() < 1e-12);
        let rho = singlet().density();
        assert!((chsh_quantum_value(&rho, &setting).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(chsh_quantum_value(&StateVector::basis_state(3, 0).unwrap(), &setting).is_err());
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(chsh_quantum_value(&mixed, &setting).unwrap().abs() < 1e-12);
    }

    #[test]
    fn classical_enumeration_bounded_by_two() {
        let vals = classical_chsh_values();
        assert_eq!(vals.len(), 16);
        assert!(vals.iter().all(|(_, s)| s.abs() <= 2));
        assert!(vals.iter().any(|(_, s)| *s == 2));
    }

    #[test]
    fn chsh_experiment_edge_cases() {
        assert!(matches!(chsh_experiment(0, 1), Err(QsimError::NoData(_))));
        let a = chsh_experiment(2000, 11).unwrap();
        let b = chsh_experiment(2000, 11).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.shots, b.shots);
        assert_eq!(a.counts.iter().sum::<usize>(), 2000);
    }
}
