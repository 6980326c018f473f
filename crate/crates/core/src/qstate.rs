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

//! Pure and mixed states, observables and projective measurement.
//!
//! Basis index convention: for a `b`-qubit register the basis label
//! `x = x₀x₁…x_{b-1}` puts qubit 0 in the most significant bit, so
//! `|x₀x₁⟩` reads left to right exactly as written.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::check_qubits;
use crate::error::{domain, validation, QsimError, Result};
use crate::kernel;
use crate::linalg::{CMatrix, DERIVED_TOL, INPUT_TOL, ONE, ZERO};
use crate::parallel::Exec;
use crate::rng::Cdf;

pub type Amplitude = Complex64;

/// Imaginary parts of expectations below this are rounding noise.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;
/// Eigenvalues of a density matrix at or below this are dropped before `log`.
pub const ENTROPY_EIGEN_CLAMP: f64 = 1e-14;
/// Eigenvalues of an observable closer than this share one projector.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Conditioning on an event with smaller probability is refused.
pub const NULL_EVENT_TOL: f64 = 1e-14;

/// Normalized pure state of a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Amplitude>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

fn check_distinct(qubits: usize, list: &[usize], what: &str) -> Result<()> {
    for (i, &q) in list.iter().enumerate() {
        if q >= qubits {
            return domain(format!("{what}: qubit {q} out of range for {qubits} qubits"));
        }
        if list[..i].contains(&q) {
            return domain(format!("{what}: qubit {q} listed twice"));
        }
    }
    Ok(())
}

pub(crate) fn check_placement(qubits: usize, targets: &[usize], controls: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return domain("empty target list");
    }
    check_distinct(qubits, targets, "targets")?;
    check_distinct(qubits, controls, "controls")?;
    if let Some(c) = controls.iter().find(|c| targets.contains(c)) {
        return domain(format!("qubit {c} is both control and target"));
    }
    Ok(())
}

impl StateVector {
    /// Wrap an amplitude array. Length must be `2^qubits` and the norm 1
    /// within `1e-10`.
    pub fn new(qubits: usize, amps: Vec<Amplitude>) -> Result<Self> {
        if qubits == 0 {
            return domain("a register needs at least one qubit");
        }
        check_qubits(qubits)?;
        if amps.len() != 1usize << qubits {
            return validation(format!(
                "{} amplitudes for {qubits} qubits (expected {})",
                amps.len(),
                1usize << qubits
            ));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return validation("non-finite amplitude");
        }
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (n - 1.0).abs() > INPUT_TOL {
            return validation(format!("state norm² is {n}, expected 1"));
        }
        Ok(StateVector { qubits, amps })
    }

    /// Rescale `amps` to unit norm.
    pub fn normalized(qubits: usize, mut amps: Vec<Amplitude>) -> Result<Self> {
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return validation("cannot normalize a zero or non-finite vector");
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Self::new(qubits, amps)
    }

    pub(crate) fn from_raw(qubits: usize, amps: Vec<Amplitude>) -> Self {
        debug_assert_eq!(amps.len(), 1 << qubits);
        StateVector { qubits, amps }
    }

    /// `|x⟩` on `b` qubits.
    pub fn basis_state(qubits: usize, x: usize) -> Result<Self> {
        if qubits == 0 {
            return domain("a register needs at least one qubit");
        }
        check_qubits(qubits)?;
        if x >= 1usize << qubits {
            return domain(format!("basis index {x} out of range for {qubits} qubits"));
        }
        let mut amps = vec![ZERO; 1 << qubits];
        amps[x] = ONE;
        Ok(StateVector { qubits, amps })
    }

    /// `2^{-b/2} Σ_x |x⟩`
    pub fn uniform(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        if qubits == 0 {
            return domain("a register needs at least one qubit");
        }
        let dim = 1usize << qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(StateVector {
            qubits,
            amps: vec![a; dim],
        })
    }

    /// Haar-like random state: standard complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(qubits)?;
        let amps = (0..1usize << qubits)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        Self::normalized(qubits, amps)
    }

    /// `α₀|0⟩ + α₁|1⟩`
    pub fn qubit(alpha0: Amplitude, alpha1: Amplitude) -> Result<Self> {
        Self::new(1, vec![alpha0, alpha1])
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amp(&self, x: usize) -> Amplitude {
        self.amps[x]
    }

    pub fn into_amps(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Born probabilities over the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `self ⊗ other`; `self` occupies the leading (high) qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        check_qubits(qubits)?;
        let mut amps = Vec::with_capacity(1 << qubits);
        for &a in &self.amps {
            amps.extend(other.amps.iter().map(|&b| a * b));
        }
        Ok(StateVector { qubits, amps })
    }

    /// `e^{iθ}|ψ⟩`
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let ph = Complex64::from_polar(1.0, theta);
        StateVector {
            qubits: self.qubits,
            amps: self.amps.iter().map(|&z| z * ph).collect(),
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Amplitude {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    /// Equality up to global phase: fidelity at least `1 - 1e-10`.
    pub fn approx_eq(&self, other: &StateVector) -> bool {
        self.qubits == other.qubits && self.fidelity(other) >= 1.0 - INPUT_TOL
    }

    /// Apply a unitary to `targets` after validating it.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<Self> {
        self.apply_controlled(u, &[], targets)
    }

    /// Apply `u` to `targets` when every qubit in `controls` is `|1⟩`.
    pub fn apply_controlled(&self, u: &CMatrix, controls: &[usize], targets: &[usize]) -> Result<Self> {
        check_placement(self.qubits, targets, controls)?;
        if u.dim() != 1 << targets.len() {
            return domain(format!(
                "{}x{} matrix on {} target qubits",
                u.dim(),
                u.dim(),
                targets.len()
            ));
        }
        u.ensure_unitary("gate")?;
        Ok(self.apply_trusted(u, controls, targets))
    }

    /// Kernel call without validation; callers guarantee a unitary matrix and
    /// a valid placement.
    pub(crate) fn apply_trusted(&self, u: &CMatrix, controls: &[usize], targets: &[usize]) -> Self {
        let amps = kernel::apply(Exec::default(), self.qubits, &self.amps, u, targets, controls);
        StateVector::from_raw(self.qubits, amps)
    }

    /// Marginal outcome distribution of `subset`; `subset[0]` is the high bit
    /// of the outcome value.
    pub fn marginal(&self, subset: &[usize]) -> Result<Vec<f64>> {
        if subset.is_empty() {
            return domain("empty measurement subset");
        }
        check_distinct(self.qubits, subset, "measurement subset")?;
        let place = kernel::Placement::new(self.qubits, subset, &[]);
        let mut probs = vec![0.0; 1 << subset.len()];
        for (i, z) in self.amps.iter().enumerate() {
            probs[place.row_of(i)] += z.norm_sqr();
        }
        Ok(probs)
    }

    /// Born-rule measurement of the qubits in `subset` in the computational
    /// basis, with collapse onto the observed outcome.
    pub fn measure_qubits<R: Rng + ?Sized>(&self, subset: &[usize], rng: &mut R) -> Result<QubitMeasurement> {
        let probs = self.marginal(subset)?;
        let value = Cdf::new(&probs).sample(rng).ok_or_else(|| {
            QsimError::Internal("all-zero marginal; state is not normalized".into())
        })?;
        let place = kernel::Placement::new(self.qubits, subset, &[]);
        let p = probs[value];
        let scale = 1.0 / p.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &z)| if place.row_of(i) == value { z * scale } else { ZERO })
            .collect();
        let bits = (0..subset.len())
            .map(|pos| ((value >> (subset.len() - 1 - pos)) & 1) as u8)
            .collect();
        Ok(QubitMeasurement {
            bits,
            value,
            post: StateVector::from_raw(self.qubits, amps),
            record: MeasurementRecord::new(Outcome::Bits(bit_string(value, subset.len())), p),
        })
    }

    /// Projective measurement whose projectors are diagonal in the
    /// computational basis: basis state `x` belongs to class `classify(x)`.
    pub fn measure_partition<R, F>(&self, classes: usize, classify: F, rng: &mut R) -> Result<PartitionMeasurement>
    where
        R: Rng + ?Sized,
        F: Fn(usize) -> usize,
    {
        let mut probs = vec![0.0; classes];
        for (i, z) in self.amps.iter().enumerate() {
            let c = classify(i);
            if c >= classes {
                return domain(format!("class {c} out of range 0..{classes}"));
            }
            probs[c] += z.norm_sqr();
        }
        let class = Cdf::new(&probs)
            .sample(rng)
            .ok_or_else(|| QsimError::Internal("all-zero class distribution".into()))?;
        let p = probs[class];
        let scale = 1.0 / p.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &z)| if classify(i) == class { z * scale } else { ZERO })
            .collect();
        Ok(PartitionMeasurement {
            class,
            probability: p,
            post: StateVector::from_raw(self.qubits, amps),
        })
    }

    /// `P(a) = ⟨ψ|Q_a|ψ⟩` for every spectral projector of `obs`.
    pub fn outcome_probabilities(&self, obs: &Observable) -> Result<Vec<f64>> {
        obs.check_dim(self.dim())?;
        Ok(obs
            .spectrum
            .iter()
            .map(|sp| {
                let v = sp.projector.mul_vec(&self.amps);
                v.iter().map(|z| z.norm_sqr()).sum()
            })
            .collect())
    }

    /// Sample an eigenvalue of `obs` and collapse to `Q_a|ψ⟩/√P(a)`.
    pub fn measure_observable<R: Rng + ?Sized>(&self, obs: &Observable, rng: &mut R) -> Result<ObservableMeasurement> {
        obs.check_dim(self.dim())?;
        let projected: Vec<Vec<Amplitude>> = obs
            .spectrum
            .iter()
            .map(|sp| sp.projector.mul_vec(&self.amps))
            .collect();
        let probs: Vec<f64> = projected
            .iter()
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        let index = Cdf::new(&probs)
            .sample(rng)
            .ok_or_else(|| QsimError::Internal("all-zero outcome distribution".into()))?;
        let p = probs[index];
        let scale = 1.0 / p.sqrt();
        let amps = projected[index].iter().map(|&z| z * scale).collect();
        let value = obs.spectrum[index].value;
        Ok(ObservableMeasurement {
            eigenvalue: value,
            index,
            probability: p,
            post: StateVector::from_raw(self.qubits, amps),
            record: MeasurementRecord::new(Outcome::Eigenvalue(value), p),
        })
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            qubits: self.qubits,
            mat: CMatrix::outer(&self.amps),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateJson {
            qubits: self.qubits,
            amplitudes: self.amps.iter().map(|z| [z.re, z.im]).collect(),
        })
        .expect("state serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let parsed: StateJson =
            serde_json::from_str(s).map_err(|e| QsimError::Validation(format!("state JSON: {e}")))?;
        let amps = parsed
            .amplitudes
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        StateVector::new(parsed.qubits, amps)
    }
}

fn bit_string(value: usize, width: usize) -> String {
    (0..width)
        .map(|pos| if (value >> (width - 1 - pos)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Either a sampled eigenvalue or a bitstring of measured qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Eigenvalue(f64),
    Bits(String),
}

/// One measurement event with its Born probability and stream provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcome: Outcome,
    pub probability: f64,
    pub shot: u64,
    pub seed: u64,
}

impl MeasurementRecord {
    pub fn new(outcome: Outcome, probability: f64) -> Self {
        MeasurementRecord {
            outcome,
            probability,
            shot: 0,
            seed: 0,
        }
    }

    pub fn tagged(mut self, seed: u64, shot: u64) -> Self {
        self.seed = seed;
        self.shot = shot;
        self
    }
}

#[derive(Debug, Clone)]
pub struct QubitMeasurement {
    /// One bit per measured qubit, in subset order.
    pub bits: Vec<u8>,
    /// The bits read as an integer, first subset qubit most significant.
    pub value: usize,
    pub post: StateVector,
    pub record: MeasurementRecord,
}

#[derive(Debug, Clone)]
pub struct ObservableMeasurement {
    pub eigenvalue: f64,
    /// Index into [`Observable::spectrum`].
    pub index: usize,
    pub probability: f64,
    pub post: StateVector,
    pub record: MeasurementRecord,
}

#[derive(Debug, Clone)]
pub struct PartitionMeasurement {
    pub class: usize,
    pub probability: f64,
    pub post: StateVector,
}

/// Eigenvalue together with the projector onto its eigenspace.
#[derive(Debug, Clone)]
pub struct SpectralProjector {
    pub value: f64,
    pub projector: CMatrix,
}

/// Hermitian operator with its cached spectral decomposition `Σ_a x_a Q_a`.
///
/// Eigenvalues equal within `1e-9` are merged into one projector.
#[derive(Debug, Clone)]
pub struct Observable {
    mat: CMatrix,
    spectrum: Vec<SpectralProjector>,
}

impl Observable {
    pub fn new(mat: CMatrix) -> Result<Self> {
        mat.ensure_hermitian("observable")?;
        let eig = mat.eigh()?;
        let n = mat.dim();
        let mut spectrum: Vec<SpectralProjector> = Vec::new();
        let mut group_start = 0;
        while group_start < n {
            let anchor = eig.values[group_start];
            let mut end = group_start + 1;
            while end < n && eig.values[end] - anchor <= DEGENERACY_TOL {
                end += 1;
            }
            let mut projector = CMatrix::zeros(n);
            for k in group_start..end {
                projector = &projector + &CMatrix::outer(&eig.vector(k));
            }
            let value = eig.values[group_start..end].iter().sum::<f64>() / (end - group_start) as f64;
            spectrum.push(SpectralProjector { value, projector });
            group_start = end;
        }
        Ok(Observable { mat, spectrum })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn spectrum(&self) -> &[SpectralProjector] {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum.iter().map(|s| s.value).collect()
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// `self ⊗ other`
    pub fn tensor(&self, other: &Observable) -> Result<Observable> {
        Observable::new(self.mat.kron(&other.mat))
    }

    /// `c · X`
    pub fn scaled(&self, c: f64) -> Result<Observable> {
        Observable::new(self.mat.scale_real(c))
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return domain(format!(
                "observable of dimension {} on a state of dimension {dim}",
                self.dim()
            ));
        }
        Ok(())
    }
}

/// Trace-one positive semi-definite Hermitian operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    qubits: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within `1e-10` and eigenvalues
    /// `≥ -1e-10`.
    pub fn new(mat: CMatrix) -> Result<Self> {
        let qubits = mat
            .qubits()
            .filter(|&q| q > 0)
            .ok_or_else(|| QsimError::Validation(format!("dimension {} is not 2^b", mat.dim())))?;
        mat.ensure_hermitian("density matrix")?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > INPUT_TOL || tr.im.abs() > INPUT_TOL {
            return validation(format!("density matrix trace is {tr}"));
        }
        let eig = mat.eigh()?;
        if let Some(&l) = eig.values.first() {
            if l < -INPUT_TOL {
                return validation(format!("density matrix has eigenvalue {l}"));
            }
        }
        Ok(DensityMatrix { qubits, mat })
    }

    /// `ρ = Σ_j p_j |ψ_j⟩⟨ψ_j|`
    pub fn from_ensemble(states: &[StateVector], probs: &[f64]) -> Result<Self> {
        if states.is_empty() || states.len() != probs.len() {
            return validation("ensemble needs one probability per state");
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return validation("ensemble probabilities must be non-negative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > INPUT_TOL {
            return validation(format!("ensemble probabilities sum to {total}"));
        }
        let qubits = states[0].qubits;
        if states.iter().any(|s| s.qubits != qubits) {
            return validation("ensemble states differ in dimension");
        }
        let mut mat = CMatrix::zeros(1 << qubits);
        for (s, &p) in states.iter().zip(probs) {
            mat = &mat + &CMatrix::outer(&s.amps).scale_real(p);
        }
        Ok(DensityMatrix { qubits, mat })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let dim = 1usize << qubits;
        Ok(DensityMatrix {
            qubits,
            mat: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    /// `A A† / tr(A A†)` for a standard complex Gaussian `A`.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(qubits)?;
        let dim = 1usize << qubits;
        let a = CMatrix::from_vec(
            (0..dim * dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        )?;
        let m = a.matmul(&a.adjoint());
        let tr = m.trace().re;
        let mut m = m.scale_real(1.0 / tr);
        // exact hermiticity
        for r in 0..dim {
            for c in r..dim {
                let z = if r == c {
                    Complex64::new(m.get(r, r).re, 0.0)
                } else {
                    m.get(r, c)
                };
                m.set(r, c, z);
                m.set(c, r, z.conj());
            }
        }
        Ok(DensityMatrix { qubits, mat: m })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.mat.eigh()?.values)
    }

    /// `(Q ρ Q / tr(Q ρ), tr(Q ρ))`
    pub fn posterior(&self, q: &CMatrix) -> Result<(DensityMatrix, f64)> {
        if q.dim() != self.mat.dim() {
            return domain("projector dimension does not match the state");
        }
        if !q.is_projector(DERIVED_TOL) {
            return validation("conditioning operator is not a projector");
        }
        let p = q.matmul(&self.mat).trace().re;
        if p < NULL_EVENT_TOL {
            return Err(QsimError::NullEvent(p));
        }
        let mat = q.matmul(&self.mat).matmul(q).scale_real(1.0 / p);
        Ok((
            DensityMatrix {
                qubits: self.qubits,
                mat,
            },
            p,
        ))
    }

    /// `S(ρ) = -Σ λ log₂ λ` in bits.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let s: f64 = self
            .eigenvalues()?
            .into_iter()
            .filter(|&l| l > ENTROPY_EIGEN_CLAMP)
            .map(|l| -l * l.ln())
            .sum();
        Ok((s / std::f64::consts::LN_2).clamp(0.0, self.qubits as f64))
    }
}

/// Anything that assigns expectation values to observables.
pub trait QuantumState {
    fn qubits(&self) -> usize;

    /// `tr(X²ρ)` and `tr(Xρ)` before the reality check.
    fn raw_moments(&self, obs: &Observable) -> Result<(Complex64, Complex64)>;

    /// `tr(Xρ)`; errors if the imaginary residue exceeds `1e-8`.
    fn expectation(&self, obs: &Observable) -> Result<f64> {
        let (_, first) = self.raw_moments(obs)?;
        real_part(first)
    }

    /// `tr(X²ρ) - tr(Xρ)²`
    fn variance(&self, obs: &Observable) -> Result<f64> {
        let (second, first) = self.raw_moments(obs)?;
        let e = real_part(first)?;
        let v = real_part(second)? - e * e;
        if v < -INPUT_TOL {
            return Err(QsimError::Numerical(format!("negative variance {v}")));
        }
        Ok(v.max(0.0))
    }
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_RESIDUE_TOL {
        return Err(QsimError::Numerical(format!(
            "expectation has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

impl QuantumState for StateVector {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn raw_moments(&self, obs: &Observable) -> Result<(Complex64, Complex64)> {
        obs.check_dim(self.dim())?;
        let xv = obs.mat.mul_vec(&self.amps);
        let first: Complex64 = self.amps.iter().zip(&xv).map(|(a, b)| a.conj() * b).sum();
        // ⟨ψ|X²|ψ⟩ = ‖Xψ‖² for Hermitian X
        let second = Complex64::new(xv.iter().map(|z| z.norm_sqr()).sum(), 0.0);
        Ok((second, first))
    }
}

impl QuantumState for DensityMatrix {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn raw_moments(&self, obs: &Observable) -> Result<(Complex64, Complex64)> {
        obs.check_dim(self.mat.dim())?;
        let xr = obs.mat.matmul(&self.mat);
        let first = xr.trace();
        let second = obs.mat.matmul(&xr).trace();
        Ok((second, first))
    }
}
