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

//! Quantum Fourier transform, phase estimation, Grover search with quantum
//! counting, and order finding on small moduli.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{domain, validation, QsimError, Result};
use crate::gates::{controlled, hadamard, phase, swap, BooleanOracle, Circuit, GateOp, DENSE_CIRCUIT_MAX_QUBITS};
use crate::kernel;
use crate::linalg::{CMatrix, ONE};
use crate::qstate::StateVector;
use crate::rng::{Cdf, StreamKey};
use crate::statharness::{repeat_verified, RepeatError, RepetitionReport};

/// Tolerance for the eigenstate check before phase estimation.
pub const EIGENSTATE_TOL: f64 = 1e-8;
/// Largest modulus order finding will simulate.
pub const ORDER_FIND_MAX_MODULUS: u64 = 64;

/// QFT on `register` (first entry most significant): Hadamards and
/// controlled phase rotations from the product representation, then the
/// qubit-reversal swaps.
pub fn qft_ops(register: &[usize]) -> Result<Vec<GateOp>> {
    let n = register.len();
    let mut ops = Vec::with_capacity(n * (n + 1) / 2 + n / 2);
    for j in 0..n {
        ops.push(hadamard(register[j]));
        for k in j + 1..n {
            let angle = TAU / (1u64 << (k - j + 1)) as f64;
            ops.push(controlled(&phase(angle, register[j]), register[k])?);
        }
    }
    for j in 0..n / 2 {
        ops.push(swap(register[j], register[n - 1 - j])?);
    }
    Ok(ops)
}

/// `|j⟩ → 2^{-n/2} Σ_k e^{2πijk/2^n} |k⟩`
pub fn qft(n: usize) -> Result<Circuit> {
    if n == 0 {
        return domain("QFT on zero qubits");
    }
    let mut c = Circuit::new(n)?;
    c.extend(qft_ops(&(0..n).collect::<Vec<_>>())?)?;
    Ok(c)
}

/// `|k⟩ → 2^{-n/2} Σ_j e^{-2πijk/2^n} |j⟩`
pub fn inverse_qft(n: usize) -> Result<Circuit> {
    Ok(qft(n)?.inverse())
}

pub fn apply_qft(s: &StateVector) -> Result<StateVector> {
    qft(s.qubits())?.run(s)
}

pub fn apply_inverse_qft(s: &StateVector) -> Result<StateVector> {
    inverse_qft(s.qubits())?.run(s)
}

fn ceil_log2(x: f64) -> f64 {
    // guard against 4.000000000000001 for exact powers of two
    let l = x.log2();
    let r = l.round();
    if (l - r).abs() < 1e-12 {
        r
    } else {
        l.ceil()
    }
}

/// Register size for accuracy `zeta` with failure probability `epsilon`:
/// `⌈log₂(1/ζ)⌉ + ⌈log₂(2 + 1/(2ε))⌉`.
pub fn register_size(zeta: f64, epsilon: f64) -> Result<usize> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return domain(format!("accuracy ζ = {zeta} must lie in (0, 1)"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("failure probability ε = {epsilon} must lie in (0, 1)"));
    }
    let b = ceil_log2(1.0 / zeta) + ceil_log2(2.0 + 1.0 / (2.0 * epsilon));
    let b = b as usize;
    // the success bound 1 - 1/(2(ζ2^b - 2)) needs ζ2^b > 2
    if zeta * (b as f64).exp2() <= 2.0 {
        return domain(format!("ζ·2^b = {} does not exceed 2", zeta * (b as f64).exp2()));
    }
    Ok(b)
}

/// Accuracy, failure probability and the register size they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePlan {
    pub zeta: f64,
    pub epsilon: f64,
    pub b: usize,
}

impl PhasePlan {
    pub fn new(zeta: f64, epsilon: f64) -> Result<Self> {
        Ok(PhasePlan {
            zeta,
            epsilon,
            b: register_size(zeta, epsilon)?,
        })
    }

    /// Plan with a fixed register and accuracy `2^-b`; failure probability is
    /// left at the bound `1/(2(ζ2^b - 2))` only when that is meaningful.
    pub fn with_register(b: usize) -> Result<Self> {
        if b == 0 {
            return domain("phase register needs at least one qubit");
        }
        Ok(PhasePlan {
            zeta: (-(b as f64)).exp2(),
            epsilon: 1.0,
            b,
        })
    }

    /// `1 - 1/(2(ζ2^b - 2))`
    pub fn success_bound(&self) -> f64 {
        let slack = self.zeta * (self.b as f64).exp2() - 2.0;
        if slack <= 0.0 {
            0.0
        } else {
            1.0 - 1.0 / (2.0 * slack)
        }
    }
}

/// Distance between phases on the unit circle, in `[0, 1/2]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Prepared phase-estimation circuit: register of `b` qubits in front of the
/// target system, controlled powers `U^{2^{b-1-j}}` from register qubit `j`,
/// inverse QFT on the register. The outcome distribution is computed once
/// and sampled per run.
#[derive(Debug, Clone)]
pub struct PhaseEstimator {
    register: usize,
    final_state: StateVector,
    distribution: Vec<f64>,
    cdf: Cdf,
}

/// One sampled estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    /// Register readout `η̃`.
    pub outcome: usize,
    /// `η̃ / 2^b`, in `[0, 1)`.
    pub phase: f64,
}

impl PhaseEstimator {
    /// `unitary` acts on all qubits of `initial`. `initial` need not be an
    /// eigenstate; order finding starts from a superposition of them.
    pub fn prepare(unitary: &CMatrix, initial: &StateVector, register: usize) -> Result<Self> {
        if register == 0 {
            return domain("phase register needs at least one qubit");
        }
        if unitary.dim() != initial.dim() {
            return domain("unitary and initial state dimensions differ");
        }
        unitary.ensure_unitary("phase-estimation unitary")?;
        let sys = initial.qubits();
        let mut state = StateVector::basis_state(register, 0)?.tensor(initial)?;
        for q in 0..register {
            state = hadamard(q).apply(&state)?;
        }
        let targets: Vec<usize> = (register..register + sys).collect();
        // U^{2^p} for p = 0..register by repeated squaring
        let mut power = unitary.clone();
        for p in 0..register {
            let control = register - 1 - p;
            state = state.apply_trusted(&power, &[control], &targets);
            if p + 1 < register {
                power = power.matmul(&power);
            }
        }
        let reg: Vec<usize> = (0..register).collect();
        for op in qft_ops(&reg)?.iter().rev() {
            state = op.inverse().apply(&state)?;
        }
        let distribution = state.marginal(&reg)?;
        let cdf = Cdf::new(&distribution);
        Ok(PhaseEstimator {
            register,
            final_state: state,
            distribution,
            cdf,
        })
    }

    pub fn register(&self) -> usize {
        self.register
    }

    /// Outcome probabilities `|β_ℓ|²` over register readouts.
    pub fn distribution(&self) -> &[f64] {
        &self.distribution
    }

    pub fn final_state(&self) -> &StateVector {
        &self.final_state
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PhaseSample> {
        let outcome = self
            .cdf
            .sample(rng)
            .ok_or_else(|| QsimError::Internal("empty phase distribution".into()))?;
        Ok(PhaseSample {
            outcome,
            phase: outcome as f64 / (self.register as f64).exp2(),
        })
    }

    /// `P(|φ̃ - φ| ≤ ζ)` with distance taken modulo 1.
    pub fn coverage(&self, phi: f64, zeta: f64) -> f64 {
        let scale = (self.register as f64).exp2();
        self.distribution
            .iter()
            .enumerate()
            .filter(|(k, _)| phase_distance(*k as f64 / scale, phi) <= zeta)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Dense operator of `u` over the first `qubits` qubits.
fn gate_operator(u: &GateOp, qubits: usize) -> Result<CMatrix> {
    if u.span() > qubits {
        return domain(format!("gate {} does not fit on {qubits} qubits", u.name()));
    }
    if qubits > DENSE_CIRCUIT_MAX_QUBITS {
        return Err(QsimError::Resource {
            requested: qubits,
            cap: DENSE_CIRCUIT_MAX_QUBITS,
        });
    }
    Ok(kernel::embed(qubits, u.matrix(), u.targets(), u.controls()))
}

/// Eigenphase `φ` with `U|x⟩ = e^{2πiφ}|x⟩`, or a validation error when `x`
/// is not an eigenvector within `1e-8`.
pub fn eigenphase(unitary: &CMatrix, x: &StateVector) -> Result<f64> {
    if unitary.dim() != x.dim() {
        return domain("unitary and state dimensions differ");
    }
    let ux = unitary.mul_vec(x.amps());
    let lambda: Complex64 = x.amps().iter().zip(&ux).map(|(a, b)| a.conj() * b).sum();
    let residual: f64 = ux
        .iter()
        .zip(x.amps())
        .map(|(u, a)| (u - lambda * a).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > EIGENSTATE_TOL || (lambda.norm() - 1.0).abs() > EIGENSTATE_TOL {
        return validation(format!("input is not an eigenstate (residual {residual:e})"));
    }
    Ok((lambda.arg() / TAU).rem_euclid(1.0))
}

/// Run phase estimation once and return `φ̃ ∈ [0, 1)`.
pub fn phase_estimate<R: Rng + ?Sized>(
    u: &GateOp,
    eigenstate: &StateVector,
    plan: &PhasePlan,
    rng: &mut R,
) -> Result<PhaseSample> {
    let op = gate_operator(u, eigenstate.qubits())?;
    eigenphase(&op, eigenstate)?;
    PhaseEstimator::prepare(&op, eigenstate, plan.b)?.sample(rng)
}

/// Grover problem geometry for `N` items with `M` solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverPlan {
    pub n: usize,
    pub m: usize,
    /// Rotation angle per iteration, `cos(θ/2) = √((N-M)/N)`.
    pub theta: f64,
    pub iterations: usize,
}

impl GroverPlan {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("search space of size {n}"));
        }
        if m == 0 || 2 * m > n {
            return domain(format!("need 1 ≤ M ≤ N/2, got M = {m}, N = {n}"));
        }
        let (nf, mf) = (n as f64, m as f64);
        let theta = 2.0 * ((nf - mf) / nf).sqrt().acos();
        let iterations = ((mf / nf).sqrt().acos() / theta).round() as usize;
        if iterations as f64 > FRAC_PI_4 * (nf / mf).sqrt() + 1.0 {
            return Err(QsimError::Internal(format!(
                "iteration count {iterations} exceeds (π/4)√(N/M) + 1"
            )));
        }
        Ok(GroverPlan {
            n,
            m,
            theta,
            iterations,
        })
    }

    /// Amplitude on the normalized solution state after `r` iterations:
    /// `sin((2r+1)θ/2)`.
    pub fn solution_amplitude(&self, r: usize) -> f64 {
        ((2 * r + 1) as f64 * self.theta / 2.0).sin()
    }

    pub fn success_probability(&self) -> f64 {
        self.solution_amplitude(self.iterations).powi(2)
    }
}

/// `R = round(arccos(√(M/N))/θ)`
pub fn grover_iterations(n: usize, m: usize) -> Result<usize> {
    Ok(GroverPlan::new(n, m)?.iterations)
}

fn check_oracle_count(f: &BooleanOracle, m: usize) -> Result<()> {
    if f.bits() <= crate::gates::ORACLE_TABLE_MAX_BITS {
        let marked = f.count();
        if marked != m {
            return validation(format!("oracle marks {marked} inputs, expected {m}"));
        }
    }
    Ok(())
}

/// Reflection about the uniform state: `a_x → 2·mean(a) - a_x`.
pub fn reflect_about_uniform(state: &StateVector) -> StateVector {
    let n = state.dim() as f64;
    let mean: Complex64 = state.amps().iter().sum::<Complex64>() / n;
    let amps = state.amps().iter().map(|&a| mean * 2.0 - a).collect();
    StateVector::from_raw(state.qubits(), amps)
}

/// One Grover iteration: oracle phase flip, then reflection about `|ψ⟩`.
pub fn grover_iterate(state: &StateVector, f: &BooleanOracle) -> Result<StateVector> {
    Ok(reflect_about_uniform(&crate::gates::phase_flip(state, f)?))
}

/// Uniform start followed by `r` iterations.
pub fn grover_state(f: &BooleanOracle, r: usize) -> Result<StateVector> {
    let mut s = StateVector::uniform(f.bits())?;
    for _ in 0..r {
        s = grover_iterate(&s, f)?;
    }
    Ok(s)
}

/// Signed overlap with `M^{-1/2} Σ_{solutions} |x⟩`.
pub fn solution_overlap(state: &StateVector, f: &BooleanOracle) -> f64 {
    let sols = f.solutions();
    let sum: Complex64 = sols.iter().map(|&x| state.amp(x)).sum();
    sum.re / (sols.len() as f64).sqrt()
}

/// Prepared search: final state after `R` iterations, sampled per run.
#[derive(Debug, Clone)]
pub struct GroverSearch {
    pub plan: GroverPlan,
    oracle: BooleanOracle,
    final_state: StateVector,
    cdf: Cdf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverOutcome {
    pub index: usize,
    pub is_solution: bool,
}

impl GroverSearch {
    pub fn new(f: &BooleanOracle, m: usize) -> Result<Self> {
        let plan = GroverPlan::new(f.domain_size(), m)?;
        check_oracle_count(f, m)?;
        let final_state = grover_state(f, plan.iterations)?;
        let cdf = Cdf::new(&final_state.probabilities());
        Ok(GroverSearch {
            plan,
            oracle: f.clone(),
            final_state,
            cdf,
        })
    }

    pub fn final_state(&self) -> &StateVector {
        &self.final_state
    }

    /// Exact probability that the readout is a solution.
    pub fn success_probability(&self) -> f64 {
        self.oracle
            .solutions()
            .iter()
            .map(|&x| self.final_state.amp(x).norm_sqr())
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<GroverOutcome> {
        let index = self
            .cdf
            .sample(rng)
            .ok_or_else(|| QsimError::Internal("empty Grover distribution".into()))?;
        Ok(GroverOutcome {
            index,
            is_solution: self.oracle.eval(index),
        })
    }
}

/// Uniform start, `R` iterations, full-register measurement.
pub fn grover_search<R: Rng + ?Sized>(f: &BooleanOracle, m: usize, rng: &mut R) -> Result<GroverOutcome> {
    GroverSearch::new(f, m)?.sample(rng)
}

/// Dense Grover operator `(2|ψ⟩⟨ψ| - I) O_f`.
pub fn grover_operator_matrix(f: &BooleanOracle) -> Result<CMatrix> {
    if f.bits() > DENSE_CIRCUIT_MAX_QUBITS {
        return Err(QsimError::Resource {
            requested: f.bits(),
            cap: DENSE_CIRCUIT_MAX_QUBITS,
        });
    }
    let dim = f.domain_size();
    let inv = 1.0 / dim as f64;
    let mut g = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let d = 2.0 * inv - if r == c { 1.0 } else { 0.0 };
            let o = if f.eval(c) { -1.0 } else { 1.0 };
            g.set(r, c, Complex64::new(d * o, 0.0));
        }
    }
    Ok(g)
}

/// Phase estimation of the Grover operator on the uniform state.
#[derive(Debug, Clone)]
pub struct QuantumCounter {
    n: usize,
    estimator: PhaseEstimator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountEstimate {
    pub m_hat: usize,
    /// Estimated rotation angle after folding `ω > π` onto `2π - ω`.
    pub theta: f64,
    pub sample: PhaseSample,
}

impl QuantumCounter {
    pub fn new(f: &BooleanOracle, plan: &PhasePlan) -> Result<Self> {
        let g = grover_operator_matrix(f)?;
        let psi = StateVector::uniform(f.bits())?;
        Ok(QuantumCounter {
            n: f.domain_size(),
            estimator: PhaseEstimator::prepare(&g, &psi, plan.b)?,
        })
    }

    pub fn estimator(&self) -> &PhaseEstimator {
        &self.estimator
    }

    /// `M̂ = N sin²(θ̂/2)`, rounded and clamped to `[0, N]`.
    pub fn count_from_phase(&self, phase: f64) -> (usize, f64) {
        let mut omega = TAU * phase;
        if omega > PI {
            omega = TAU - omega;
        }
        let m = self.n as f64 * (omega / 2.0).sin().powi(2);
        ((m.round().max(0.0) as usize).min(self.n), omega)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CountEstimate> {
        let sample = self.estimator.sample(rng)?;
        let (m_hat, theta) = self.count_from_phase(sample.phase);
        Ok(CountEstimate { m_hat, theta, sample })
    }

    /// Exact probability that the rounded count equals `m`.
    pub fn probability_of(&self, m: usize) -> f64 {
        let scale = (self.estimator.register() as f64).exp2();
        self.estimator
            .distribution()
            .iter()
            .enumerate()
            .filter(|(k, _)| self.count_from_phase(*k as f64 / scale).0 == m)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Estimate the number of marked inputs.
pub fn quantum_count<R: Rng + ?Sized>(f: &BooleanOracle, plan: &PhasePlan, rng: &mut R) -> Result<CountEstimate> {
    QuantumCounter::new(f, plan)?.sample(rng)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % modulus;
        }
        b = b * b % modulus;
        exp >>= 1;
    }
    acc
}

/// Qubits needed to hold `0..modulus`.
pub fn modulus_qubits(modulus: u64) -> usize {
    (64 - (modulus - 1).leading_zeros()).max(1) as usize
}

fn check_order_problem(x: u64, modulus: u64) -> Result<()> {
    if modulus < 2 {
        return domain(format!("modulus {modulus} must be at least 2"));
    }
    if x == 0 || x >= modulus {
        return domain(format!("base {x} must satisfy 0 < x < N = {modulus}"));
    }
    if gcd(x, modulus) != 1 {
        return domain(format!("gcd({x}, {modulus}) = {} ≠ 1", gcd(x, modulus)));
    }
    Ok(())
}

/// `U|y⟩ = |xy mod N⟩` for `y < N`, identity on the padding states `y ≥ N`.
pub fn modmul_unitary(x: u64, modulus: u64) -> Result<GateOp> {
    check_order_problem(x, modulus)?;
    let qubits = modulus_qubits(modulus);
    let dim = 1usize << qubits;
    let mut m = CMatrix::zeros(dim);
    for y in 0..dim as u64 {
        let image = if y < modulus { x * y % modulus } else { y };
        m.set(image as usize, y as usize, ONE);
    }
    GateOp::new(format!("MUL{x}MOD{modulus}"), m, (0..qubits).collect(), vec![])
}

/// Phase estimation on the modular multiplier starting from `|1⟩`, with a
/// `2n + 1` qubit register for an `n`-qubit modulus.
#[derive(Debug, Clone)]
pub struct OrderFinder {
    pub x: u64,
    pub modulus: u64,
    estimator: PhaseEstimator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderCandidate {
    pub sample: PhaseSample,
    /// Smallest `d ≤ N` with `|φ̃ - s/d| < 2^{-b}` for some integer `s`.
    pub denominator: Option<u64>,
}

impl OrderFinder {
    pub fn new(x: u64, modulus: u64) -> Result<Self> {
        if modulus > ORDER_FIND_MAX_MODULUS {
            return domain(format!(
                "modulus {modulus} above the dense simulation limit {ORDER_FIND_MAX_MODULUS}"
            ));
        }
        let u = modmul_unitary(x, modulus)?;
        let n = modulus_qubits(modulus);
        let one = StateVector::basis_state(n, 1)?;
        let estimator = PhaseEstimator::prepare(u.matrix(), &one, 2 * n + 1)?;
        Ok(OrderFinder { x, modulus, estimator })
    }

    pub fn estimator(&self) -> &PhaseEstimator {
        &self.estimator
    }

    pub fn denominator_of(&self, phase: f64) -> Option<u64> {
        let window = (-(self.estimator.register() as f64)).exp2();
        (1..=self.modulus).find(|&d| {
            let s = (phase * d as f64).round();
            (phase - s / d as f64).abs() < window
        })
    }

    pub fn candidate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<OrderCandidate> {
        let sample = self.estimator.sample(rng)?;
        Ok(OrderCandidate {
            sample,
            denominator: self.denominator_of(sample.phase),
        })
    }

    /// `x^r ≡ 1 (mod N)`
    pub fn verify(&self, r: u64) -> bool {
        r >= 1 && mod_pow(self.x, r, self.modulus) == 1
    }
}

/// Order of `x` modulo `N`, repeating phase estimation until a candidate
/// denominator passes `x^r ≡ 1 (mod N)` or `budget` runs are used.
pub fn order_find(x: u64, modulus: u64, seed: u64, budget: usize) -> Result<RepetitionReport<OrderCandidate>> {
    let finder = OrderFinder::new(x, modulus)?;
    let key = StreamKey::new(seed, "order-find").child(modulus << 32 | x);
    repeat_verified(
        |run| finder.candidate(&mut key.shot(run as u64)),
        |c: &OrderCandidate| c.denominator.is_some_and(|d| finder.verify(d)),
        budget,
    )
    .map_err(|e| match e {
        RepeatError::Run(e) => e,
        RepeatError::Exhausted(ex) => QsimError::NotFound(format!(
            "order of {x} mod {modulus} not verified in {budget} runs; candidate denominators {:?}",
            ex.candidates.iter().map(|c| c.denominator).collect::<Vec<_>>()
        )),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::shot_rng;

    #[test]
    fn one_qubit_qft_is_hadamard() {
        let m = qft(1).unwrap().dense_matrix().unwrap();
        assert!(m.max_abs_diff(&crate::linalg::paulis::h()) < 1e-15);
        let mi = inverse_qft(1).unwrap().dense_matrix().unwrap();
        assert!(mi.max_abs_diff(&crate::linalg::paulis::h()) < 1e-15);
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        let out = apply_qft(&StateVector::basis_state(4, 0).unwrap()).unwrap();
        assert!(out.approx_eq(&StateVector::uniform(4).unwrap()));
        assert!(qft(0).is_err());
    }

    #[test]
    fn register_size_examples() {
        assert_eq!(register_size(0.0625, 0.25).unwrap(), 6);
        assert_eq!(register_size(0.5, 0.5).unwrap(), 3);
        assert_eq!(register_size(0.0625, 0.1).unwrap(), 7);
        assert!(register_size(1.0, 0.1).is_err());
        assert!(register_size(0.1, 0.0).is_err());
        assert!(register_size(0.1, 1.0).is_err());
    }

    #[test]
    fn phase_distance_wraps() {
        assert!((phase_distance(0.95, 0.05) - 0.1).abs() < 1e-15);
        assert!((phase_distance(0.3, 0.1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn exact_phase_five_eighths() {
        let u = GateOp::new(
            "P",
            CMatrix::diagonal(&[ONE, Complex64::from_polar(1.0, TAU * 5.0 / 8.0)]),
            vec![0],
            vec![],
        )
        .unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        let plan = PhasePlan::with_register(3).unwrap();
        for shot in 0..20 {
            let s = phase_estimate(&u, &one, &plan, &mut shot_rng(0, "pe", shot)).unwrap();
            assert_eq!(s.phase, 0.625);
        }
        let zero = StateVector::basis_state(1, 0).unwrap();
        let s = phase_estimate(&u, &zero, &plan, &mut shot_rng(0, "pe", 0)).unwrap();
        assert_eq!(s.phase, 0.0);
    }

    #[test]
    fn phase_estimate_rejects_non_eigenstate() {
        let u = GateOp::new("X", crate::linalg::paulis::x(), vec![0], vec![]).unwrap();
        let zero = StateVector::basis_state(1, 0).unwrap();
        let plan = PhasePlan::with_register(3).unwrap();
        assert!(matches!(
            phase_estimate(&u, &zero, &plan, &mut shot_rng(0, "pe", 0)),
            Err(QsimError::Validation(_))
        ));
    }

    #[test]
    fn grover_iteration_counts() {
        assert_eq!(grover_iterations(4, 1).unwrap(), 1);
        let r = grover_iterations(64, 32).unwrap();
        assert!(r == 0 || r == 1);
        let big = grover_iterations(1 << 20, 1).unwrap();
        assert_eq!(big, 804);
        assert!((big as f64) <= FRAC_PI_4 * 1024.0);
        assert!(grover_iterations(4, 3).is_err());
        assert!(grover_iterations(4, 0).is_err());
    }

    #[test]
    fn grover_n4_is_certain() {
        let f = BooleanOracle::marking(2, &[2]).unwrap();
        let search = GroverSearch::new(&f, 1).unwrap();
        assert!((search.plan.theta - PI / 3.0).abs() < 1e-15);
        assert_eq!(search.plan.iterations, 1);
        assert!((search.success_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grover_half_marked() {
        let f = BooleanOracle::marking(1, &[0]).unwrap();
        let s = GroverSearch::new(&f, 1).unwrap();
        assert!(s.success_probability() >= 0.5 - 1e-12);
        assert!(GroverSearch::new(&f, 2).is_err());
        // wrong declared count
        let g = BooleanOracle::marking(3, &[1, 2]).unwrap();
        assert!(matches!(GroverSearch::new(&g, 1), Err(QsimError::Validation(_))));
    }

    #[test]
    fn counting_edge_cases() {
        let none = BooleanOracle::from_fn(3, |_| false).unwrap();
        let plan = PhasePlan::new(0.125, 0.25).unwrap();
        for shot in 0..10 {
            let c = quantum_count(&none, &plan, &mut shot_rng(1, "count", shot)).unwrap();
            assert_eq!(c.m_hat, 0);
        }
        let all = BooleanOracle::from_fn(3, |_| true).unwrap();
        let c = quantum_count(&all, &plan, &mut shot_rng(1, "count", 0)).unwrap();
        assert_eq!(c.m_hat, 8);
    }

    #[test]
    fn modmul_examples() {
        let id = modmul_unitary(1, 5).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(8));
        let u = modmul_unitary(2, 5).unwrap();
        for (from, to) in [(1, 2), (2, 4), (4, 3), (3, 1), (0, 0), (5, 5), (7, 7)] {
            assert_eq!(u.matrix().get(to, from), ONE, "{from} -> {to}");
        }
        assert!(modmul_unitary(2, 4).is_err());
        assert!(modmul_unitary(5, 5).is_err());
    }

    #[test]
    fn order_examples() {
        for (x, n, r) in [(2, 5, 4), (1, 7, 1), (4, 5, 2), (1, 2, 1)] {
            let rep = order_find(x, n, 17, 25).unwrap();
            assert_eq!(rep.value.denominator, Some(r), "x={x} N={n}");
        }
        assert!(order_find(3, 65, 0, 5).is_err());
    }

    #[test]
    fn helpers() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(mod_pow(2, 10, 1000), 24);
        assert_eq!(modulus_qubits(2), 1);
        assert_eq!(modulus_qubits(4), 2);
        assert_eq!(modulus_qubits(5), 3);
        assert_eq!(modulus_qubits(21), 5);
    }
}
