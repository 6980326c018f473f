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

//! Bit-flip and phase-flip channels, the three-qubit repetition codes, and
//! Shor's nine-qubit code.

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, QsimError, Result};
use crate::gates::{cnot, hadamard, pauli_x, pauli_z, GateOp};
use crate::parallel::{try_map_indexed, Exec};
use crate::qstate::StateVector;
use crate::rng::StreamKey;

/// Decoded states with fidelity below `1 - LOGICAL_FAILURE_TOL` count as
/// logical errors.
pub const LOGICAL_FAILURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipKind {
    BitFlip,
    PhaseFlip,
}

/// Independent flips with probability `p` on every qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChannel {
    pub kind: FlipKind,
    pub p: f64,
}

impl NoiseChannel {
    pub fn new(kind: FlipKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("flip probability {p} outside [0, 1]"));
        }
        Ok(NoiseChannel { kind, p })
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::new(FlipKind::BitFlip, p)
    }

    pub fn phase_flip(p: f64) -> Result<Self> {
        Self::new(FlipKind::PhaseFlip, p)
    }

    fn flip(&self, q: usize) -> GateOp {
        match self.kind {
            FlipKind::BitFlip => pauli_x(q),
            FlipKind::PhaseFlip => pauli_z(q),
        }
    }
}

/// Apply the channel to each qubit independently. The returned mask has
/// qubit 0 in its most significant of `qubits` bits, matching basis indices.
pub fn apply_channel<R: Rng + ?Sized>(s: &StateVector, ch: &NoiseChannel, rng: &mut R) -> Result<(StateVector, u64)> {
    let b = s.qubits();
    if b > 64 {
        return domain("flip mask limited to 64 qubits");
    }
    let mut out = s.clone();
    let mut mask = 0u64;
    for q in 0..b {
        if rng.random::<f64>() < ch.p {
            mask |= 1 << (b - 1 - q);
            out = ch.flip(q).apply(&out)?;
        }
    }
    Ok((out, mask))
}

/// Outcome of the parity measurement on a block of three qubits: 0 for no
/// flip, `k` for a flip on the block's `k`-th qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Syndrome(pub u8);

impl Syndrome {
    pub fn value(self) -> u8 {
        self.0
    }

    /// Syndrome of a basis state from its pairwise parities.
    fn from_parities(p12: bool, p23: bool) -> Self {
        Syndrome(match (p12, p23) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        })
    }
}

fn bit(i: usize, qubits: usize, q: usize) -> bool {
    (i >> (qubits - 1 - q)) & 1 == 1
}

fn check_block(s: &StateVector, block: [usize; 3]) -> Result<()> {
    crate::qstate::check_placement(s.qubits(), &block, &[])
}

/// Measure the projectors `Q₀..Q₃` on `block` of a larger register.
pub fn block_syndrome<R: Rng + ?Sized>(
    s: &StateVector,
    block: [usize; 3],
    rng: &mut R,
) -> Result<(Syndrome, StateVector)> {
    check_block(s, block)?;
    let b = s.qubits();
    let m = s.measure_partition(
        4,
        |i| {
            let [x, y, z] = block.map(|q| bit(i, b, q));
            Syndrome::from_parities(x ^ y, y ^ z).0 as usize
        },
        rng,
    )?;
    Ok((Syndrome(m.class as u8), m.post))
}

/// `Q₀ = |000⟩⟨000| + |111⟩⟨111|`, `Q₁ = |100⟩⟨100| + |011⟩⟨011|`,
/// `Q₂ = |010⟩⟨010| + |101⟩⟨101|`, `Q₃ = |001⟩⟨001| + |110⟩⟨110|`.
pub fn syndrome_measure<R: Rng + ?Sized>(s: &StateVector, rng: &mut R) -> Result<(Syndrome, StateVector)> {
    if s.qubits() != 3 {
        return domain(format!("three-qubit syndrome on {} qubits", s.qubits()));
    }
    block_syndrome(s, [0, 1, 2], rng)
}

/// Exact outcome probabilities of the four syndrome projectors.
pub fn syndrome_distribution(s: &StateVector, block: [usize; 3]) -> Result<[f64; 4]> {
    check_block(s, block)?;
    let b = s.qubits();
    let mut p = [0.0; 4];
    for (i, z) in s.amps().iter().enumerate() {
        let [x, y, w] = block.map(|q| bit(i, b, q));
        p[Syndrome::from_parities(x ^ y, y ^ w).0 as usize] += z.norm_sqr();
    }
    Ok(p)
}

fn recover_block(s: &StateVector, block: [usize; 3], syn: Syndrome, kind: FlipKind) -> Result<StateVector> {
    match syn.0 {
        0 => Ok(s.clone()),
        k @ 1..=3 => {
            let q = block[k as usize - 1];
            match kind {
                FlipKind::BitFlip => pauli_x(q).apply(s),
                FlipKind::PhaseFlip => pauli_z(q).apply(s),
            }
        }
        k => domain(format!("syndrome {k} outside 0..=3")),
    }
}

/// `σ_x` on the qubit named by the syndrome.
pub fn recover_bitflip(s: &StateVector, syn: Syndrome) -> Result<StateVector> {
    recover_block(s, [0, 1, 2], syn, FlipKind::BitFlip)
}

fn one_qubit(q: &StateVector) -> Result<()> {
    if q.qubits() != 1 {
        return domain(format!("encoder input has {} qubits", q.qubits()));
    }
    Ok(())
}

fn bitflip_encoder(block: [usize; 3]) -> Result<[GateOp; 2]> {
    Ok([cnot(block[0], block[1])?, cnot(block[0], block[2])?])
}

fn apply_all(s: StateVector, ops: &[GateOp]) -> Result<StateVector> {
    ops.iter().try_fold(s, |s, op| op.apply(&s))
}

fn hadamards(s: StateVector, qubits: &[usize]) -> Result<StateVector> {
    qubits.iter().try_fold(s, |s, &q| hadamard(q).apply(&s))
}

/// `α₀|0⟩ + α₁|1⟩ → α₀|000⟩ + α₁|111⟩`
pub fn encode_bitflip(q: &StateVector) -> Result<StateVector> {
    one_qubit(q)?;
    let s = q.tensor(&StateVector::basis_state(2, 0)?)?;
    apply_all(s, &bitflip_encoder([0, 1, 2])?)
}

/// `|0⟩ → |+++⟩`, `|1⟩ → |−−−⟩`
pub fn encode_phaseflip(q: &StateVector) -> Result<StateVector> {
    hadamards(encode_bitflip(q)?, &[0, 1, 2])
}

/// Bit-flip syndrome measured in the `|±⟩` basis.
pub fn syndrome_measure_phase<R: Rng + ?Sized>(s: &StateVector, rng: &mut R) -> Result<(Syndrome, StateVector)> {
    if s.qubits() != 3 {
        return domain(format!("three-qubit syndrome on {} qubits", s.qubits()));
    }
    let (syn, post) = syndrome_measure(&hadamards(s.clone(), &[0, 1, 2])?, rng)?;
    Ok((syn, hadamards(post, &[0, 1, 2])?))
}

/// `σ_z` on the qubit named by the syndrome.
pub fn recover_phaseflip(s: &StateVector, syn: Syndrome) -> Result<StateVector> {
    recover_block(s, [0, 1, 2], syn, FlipKind::PhaseFlip)
}

/// Encode, pass through `ch`, measure the syndrome, recover. Returns the
/// recovered state, the syndrome and the realized flip mask.
pub fn three_qubit_cycle<R: Rng + ?Sized>(
    q: &StateVector,
    ch: &NoiseChannel,
    rng: &mut R,
) -> Result<(StateVector, Syndrome, u64)> {
    let phase = ch.kind == FlipKind::PhaseFlip;
    let encoded = if phase { encode_phaseflip(q)? } else { encode_bitflip(q)? };
    let (noisy, mask) = apply_channel(&encoded, ch, rng)?;
    let (syn, post) = if phase {
        syndrome_measure_phase(&noisy, rng)?
    } else {
        syndrome_measure(&noisy, rng)?
    };
    Ok((recover_block(&post, [0, 1, 2], syn, ch.kind)?, syn, mask))
}

const SHOR_BLOCKS: [[usize; 3]; 3] = [[0, 1, 2], [3, 4, 5], [6, 7, 8]];
const SHOR_LEADS: [usize; 3] = [0, 3, 6];

fn shor_inner_encoder() -> Result<Vec<GateOp>> {
    let mut ops = Vec::new();
    for block in SHOR_BLOCKS {
        ops.extend(bitflip_encoder(block)?);
    }
    Ok(ops)
}

/// `|0⟩ → ((|000⟩+|111⟩)/√2)^{⊗3}`, `|1⟩ → ((|000⟩−|111⟩)/√2)^{⊗3}`
pub fn encode_shor9(q: &StateVector) -> Result<StateVector> {
    one_qubit(q)?;
    let s = q.tensor(&StateVector::basis_state(8, 0)?)?;
    let s = apply_all(s, &bitflip_encoder(SHOR_LEADS)?)?;
    let s = hadamards(s, &SHOR_LEADS)?;
    apply_all(s, &shor_inner_encoder()?)
}

/// Bit-flip correction inside each block, then the phase correction across
/// blocks: undo the inner encoding, rotate the block leads to the bit-flip
/// picture, correct there, and re-encode.
pub fn shor9_correct<R: Rng + ?Sized>(s: &StateVector, rng: &mut R) -> Result<StateVector> {
    if s.qubits() != 9 {
        return domain(format!("nine-qubit decoder on {} qubits", s.qubits()));
    }
    let mut state = s.clone();
    for block in SHOR_BLOCKS {
        let (syn, post) = block_syndrome(&state, block, rng)?;
        state = recover_block(&post, block, syn, FlipKind::BitFlip)?;
    }
    let inner = shor_inner_encoder()?;
    state = apply_all(state, &inner)?;
    state = hadamards(state, &SHOR_LEADS)?;
    let (syn, post) = block_syndrome(&state, SHOR_LEADS, rng)?;
    state = recover_block(&post, SHOR_LEADS, syn, FlipKind::BitFlip)?;
    state = hadamards(state, &SHOR_LEADS)?;
    apply_all(state, &inner)
}

/// The single-qubit error types the nine-qubit code corrects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PauliError {
    X,
    Z,
    /// `σ_z σ_x`
    ZX,
}

impl PauliError {
    pub const ALL: [PauliError; 3] = [PauliError::X, PauliError::Z, PauliError::ZX];

    pub fn apply(self, s: &StateVector, q: usize) -> Result<StateVector> {
        match self {
            PauliError::X => pauli_x(q).apply(s),
            PauliError::Z => pauli_z(q).apply(s),
            PauliError::ZX => pauli_z(q).apply(&pauli_x(q).apply(s)?),
        }
    }
}

/// `3p² − 2p³`: at least two of three independent flips.
pub fn predicted_logical_error(p: f64) -> f64 {
    3.0 * p * p - 2.0 * p * p * p
}

/// One row of a logical-error sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalErrorEstimate {
    pub p: f64,
    pub shots: usize,
    pub failures: usize,
    pub rate: f64,
    pub predicted: f64,
    /// `√(rate(1−rate)/shots)`
    pub stderr: f64,
}

impl LogicalErrorEstimate {
    /// `|rate − predicted|` in units of the binomial standard error at the
    /// predicted rate.
    pub fn z_score(&self) -> f64 {
        let sigma = (self.predicted * (1.0 - self.predicted) / self.shots as f64).sqrt();
        if sigma == 0.0 {
            if self.rate == self.predicted {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.rate - self.predicted).abs() / sigma
        }
    }
}

/// Monte Carlo logical error rate of the three-qubit bit-flip code. Each
/// shot draws a random logical qubit, runs encode, channel, syndrome and
/// recovery, and fails when the result is not the encoded input.
pub fn logical_error_rate(p: f64, shots: usize, seed: u64, exec: Exec) -> Result<LogicalErrorEstimate> {
    if shots == 0 {
        return Err(QsimError::NoData("logical error rate from zero shots".into()));
    }
    let ch = NoiseChannel::bit_flip(p)?;
    let key = StreamKey::new(seed, "qec-bitflip").child(p.to_bits());
    let fails = try_map_indexed(exec, shots, |shot| {
        let mut rng = key.shot(shot as u64);
        let logical = StateVector::random(1, &mut rng)?;
        let target = encode_bitflip(&logical)?;
        let (recovered, _, _) = three_qubit_cycle(&logical, &ch, &mut rng)?;
        Ok::<_, QsimError>(recovered.fidelity(&target) < 1.0 - LOGICAL_FAILURE_TOL)
    })?;
    let failures = fails.iter().filter(|&&f| f).count();
    let rate = failures as f64 / shots as f64;
    Ok(LogicalErrorEstimate {
        p,
        shots,
        failures,
        rate,
        predicted: predicted_logical_error(p),
        stderr: (rate * (1.0 - rate) / shots as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::shot_rng;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn qubit(a: f64, b: f64) -> StateVector {
        StateVector::normalized(1, vec![Complex64::new(a, 0.0), Complex64::new(0.0, b)]).unwrap()
    }

    #[test]
    fn bitflip_encoding() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert!(encode_bitflip(&zero).unwrap().approx_eq(&StateVector::basis_state(3, 0).unwrap()));
        assert!(encode_bitflip(&one).unwrap().approx_eq(&StateVector::basis_state(3, 7).unwrap()));
        let sup = StateVector::normalized(1, vec![FRAC_1_SQRT_2.into(), FRAC_1_SQRT_2.into()]).unwrap();
        let e = encode_bitflip(&sup).unwrap();
        assert!((e.amp(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((e.amp(7).re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn channel_extremes() {
        let s = StateVector::basis_state(3, 0).unwrap();
        let mut rng = shot_rng(0, "ch", 0);
        let (out, mask) = apply_channel(&s, &NoiseChannel::bit_flip(0.0).unwrap(), &mut rng).unwrap();
        assert_eq!((out, mask), (s.clone(), 0));
        let (out, mask) = apply_channel(&s, &NoiseChannel::bit_flip(1.0).unwrap(), &mut rng).unwrap();
        assert_eq!(mask, 0b111);
        assert!(out.approx_eq(&StateVector::basis_state(3, 7).unwrap()));
        assert!(NoiseChannel::bit_flip(1.5).is_err());
    }

    #[test]
    fn syndrome_one_leaves_state() {
        let logical = qubit(0.6, 0.8);
        let flipped = pauli_x(0).apply(&encode_bitflip(&logical).unwrap()).unwrap();
        let (syn, post) = syndrome_measure(&flipped, &mut shot_rng(0, "syn", 0)).unwrap();
        assert_eq!(syn, Syndrome(1));
        assert!((post.fidelity(&flipped) - 1.0).abs() < 1e-12);
        let fixed = recover_bitflip(&post, syn).unwrap();
        assert!((fixed.fidelity(&encode_bitflip(&logical).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn syndromes_for_each_qubit() {
        let code = encode_bitflip(&qubit(0.3, 0.7)).unwrap();
        let (syn, _) = syndrome_measure(&code, &mut shot_rng(0, "syn", 0)).unwrap();
        assert_eq!(syn, Syndrome(0));
        for q in 0..3 {
            let e = pauli_x(q).apply(&code).unwrap();
            assert_eq!(syndrome_distribution(&e, [0, 1, 2]).unwrap()[q + 1], 1.0);
        }
    }

    #[test]
    fn two_flips_give_logical_error() {
        let logical = qubit(0.6, 0.8);
        let code = encode_bitflip(&logical).unwrap();
        let e = pauli_x(1).apply(&pauli_x(2).apply(&code).unwrap()).unwrap();
        let (syn, post) = syndrome_measure(&e, &mut shot_rng(0, "syn", 0)).unwrap();
        assert_eq!(syn, Syndrome(1));
        let out = recover_bitflip(&post, syn).unwrap();
        let flipped_logical = encode_bitflip(&pauli_x(0).apply(&logical).unwrap()).unwrap();
        assert!((out.fidelity(&flipped_logical) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_code() {
        let zero = encode_phaseflip(&StateVector::basis_state(1, 0).unwrap()).unwrap();
        assert!(zero.approx_eq(&StateVector::uniform(3).unwrap()));
        let sup = StateVector::normalized(1, vec![FRAC_1_SQRT_2.into(), FRAC_1_SQRT_2.into()]).unwrap();
        let code = encode_phaseflip(&sup).unwrap();
        for q in 0..3 {
            let e = pauli_z(q).apply(&code).unwrap();
            let (syn, post) = syndrome_measure_phase(&e, &mut shot_rng(0, "ph", q as u64)).unwrap();
            assert_eq!(syn.value() as usize, q + 1);
            let fixed = recover_phaseflip(&post, syn).unwrap();
            assert!((fixed.fidelity(&code) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shor_codewords() {
        let zero = encode_shor9(&StateVector::basis_state(1, 0).unwrap()).unwrap();
        let one = encode_shor9(&StateVector::basis_state(1, 1).unwrap()).unwrap();
        let amp = 1.0 / (2.0 * 2f64.sqrt());
        let nz: Vec<_> = zero.amps().iter().filter(|z| z.norm() > 1e-12).collect();
        assert_eq!(nz.len(), 8);
        assert!(nz.iter().all(|z| (z.re - amp).abs() < 1e-12));
        assert!(zero.inner(&one).norm() < 1e-12);
        // |1⟩ codeword: sign is the parity of the number of |111⟩ blocks
        assert!((one.amp(0b111_111_111).re + amp).abs() < 1e-12);
    }

    #[test]
    fn shor_examples() {
        let logical = qubit(0.6, 0.8);
        let code = encode_shor9(&logical).unwrap();
        for (err, q) in [(PauliError::X, 4), (PauliError::Z, 7), (PauliError::ZX, 1)] {
            let e = err.apply(&code, q).unwrap();
            let fixed = shor9_correct(&e, &mut shot_rng(0, "shor", 0)).unwrap();
            assert!((fixed.fidelity(&code) - 1.0).abs() < 1e-9, "{err:?} on {q}");
        }
    }

    #[test]
    fn logical_rate_at_zero() {
        let r = logical_error_rate(0.0, 500, 1, Exec::Sequential).unwrap();
        assert_eq!((r.failures, r.rate, r.predicted), (0, 0.0, 0.0));
        assert_eq!(r.z_score(), 0.0);
        assert!((predicted_logical_error(0.1) - 0.028).abs() < 1e-15);
    }
}
