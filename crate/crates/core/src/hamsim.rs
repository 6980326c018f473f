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

//! Time evolution under local Hamiltonians: exact dense evolution, the
//! symmetric Trotter product, and Grover search recast as a Hamiltonian.
//!
//! A [`HamiltonianTerms`] with terms `H_ℓ` represents `H = 2 Σ_ℓ H_ℓ`. The
//! factor of two makes one symmetric step
//! `[e^{-iH₁δ}⋯e^{-iH_Lδ}][e^{-iH_Lδ}⋯e^{-iH₁δ}]` approximate `e^{-iHδ}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, QsimError, Result};
use crate::gates::{matrix_from_pairs, matrix_to_pairs};
use crate::kernel;
use crate::linalg::CMatrix;
use crate::qstate::{check_placement, StateVector};

/// Largest subsystem a single term may act on.
pub const MAX_TERM_QUBITS: usize = 3;
/// Largest system the dense exact-evolution oracle handles.
pub const EXACT_MAX_QUBITS: usize = 10;

/// One local term `H_ℓ` acting on `targets` (first target most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub targets: Vec<usize>,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerms {
    qubits: usize,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    targets: Vec<usize>,
    matrix: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianFile {
    qubits: usize,
    terms: Vec<TermFile>,
}

impl HamiltonianTerms {
    pub fn new(qubits: usize) -> Result<Self> {
        if qubits == 0 {
            return domain("Hamiltonian on zero qubits");
        }
        crate::config::check_qubits(qubits)?;
        Ok(HamiltonianTerms { qubits, terms: Vec::new() })
    }

    pub fn add_term(&mut self, matrix: CMatrix, targets: Vec<usize>) -> Result<&mut Self> {
        if targets.is_empty() || targets.len() > MAX_TERM_QUBITS {
            return domain(format!(
                "a term acts on {} qubits; allowed 1..={MAX_TERM_QUBITS}",
                targets.len()
            ));
        }
        check_placement(self.qubits, &targets, &[])?;
        if matrix.dim() != 1 << targets.len() {
            return validation(format!(
                "term matrix of dimension {} on {} targets",
                matrix.dim(),
                targets.len()
            ));
        }
        matrix.ensure_hermitian("Hamiltonian term")?;
        self.terms.push(Term { targets, matrix });
        Ok(self)
    }

    pub fn with_term(mut self, matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        self.add_term(matrix, targets)?;
        Ok(self)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Dense `H = 2 Σ_ℓ H_ℓ`.
    pub fn dense(&self) -> Result<CMatrix> {
        if self.qubits > EXACT_MAX_QUBITS {
            return Err(QsimError::Resource {
                requested: self.qubits,
                cap: EXACT_MAX_QUBITS,
            });
        }
        let mut h = CMatrix::zeros(1 << self.qubits);
        for t in &self.terms {
            h = &h + &kernel::embed(self.qubits, &t.matrix, &t.targets, &[]);
        }
        Ok(h.scale_real(2.0))
    }

    /// Whether every pair of embedded terms commutes within `tol`.
    pub fn terms_commute(&self, tol: f64) -> Result<bool> {
        let mats: Vec<CMatrix> = self
            .terms
            .iter()
            .map(|t| kernel::embed(self.qubits, &t.matrix, &t.targets, &[]))
            .collect();
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let ab = mats[i].matmul(&mats[j]);
                let ba = mats[j].matmul(&mats[i]);
                if ab.max_abs_diff(&ba) > tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> String {
        let file = HamiltonianFile {
            qubits: self.qubits,
            terms: self
                .terms
                .iter()
                .map(|t| TermFile {
                    targets: t.targets.clone(),
                    matrix: matrix_to_pairs(&t.matrix),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("serializing plain numbers")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: HamiltonianFile =
            serde_json::from_str(s).map_err(|e| QsimError::Validation(format!("Hamiltonian JSON: {e}")))?;
        let mut h = HamiltonianTerms::new(file.qubits)?;
        for t in file.terms {
            h.add_term(matrix_from_pairs(&t.matrix)?, t.targets)?;
        }
        Ok(h)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| QsimError::Validation(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Evolution time `t_final` split into `m` equal steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterPlan {
    pub t_final: f64,
    pub m: usize,
}

impl TrotterPlan {
    pub fn new(t_final: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return domain("Trotter plan with zero steps");
        }
        if !t_final.is_finite() || t_final < 0.0 {
            return domain(format!("evolution time {t_final}"));
        }
        Ok(TrotterPlan { t_final, m })
    }

    /// Unit time, as in the usual `t_j = j/m` grid.
    pub fn unit(m: usize) -> Result<Self> {
        Self::new(1.0, m)
    }

    /// A single step of length `delta`.
    pub fn single_step(delta: f64) -> Result<Self> {
        Self::new(delta, 1)
    }

    pub fn delta(&self) -> f64 {
        self.t_final / self.m as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.m).map(|j| self.t_final * j as f64 / self.m as f64).collect()
    }
}

fn check_state(h: &HamiltonianTerms, psi: &StateVector) -> Result<()> {
    if psi.qubits() != h.qubits() {
        return domain(format!(
            "state on {} qubits, Hamiltonian on {}",
            psi.qubits(),
            h.qubits()
        ));
    }
    Ok(())
}

/// `e^{-iHt}|ψ⟩` for a dense Hermitian `H`.
pub fn evolve_dense(h: &CMatrix, t: f64, psi: &StateVector) -> Result<StateVector> {
    if h.dim() != psi.dim() {
        return domain("Hamiltonian and state dimensions differ");
    }
    let u = h.exp_i_hermitian(t)?;
    StateVector::normalized(psi.qubits(), u.mul_vec(psi.amps()))
}

/// `|ψ(t)⟩ = e^{-iHt}|ψ(0)⟩` through the eigendecomposition of the dense `H`.
pub fn exact_evolve(h: &HamiltonianTerms, t: f64, psi0: &StateVector) -> Result<StateVector> {
    check_state(h, psi0)?;
    evolve_dense(&h.dense()?, t, psi0)
}

/// The factors of one symmetric step, in application order.
#[derive(Debug, Clone)]
pub struct TrotterStep {
    qubits: usize,
    factors: Vec<(CMatrix, Vec<usize>)>,
}

impl TrotterStep {
    pub fn factors(&self) -> &[(CMatrix, Vec<usize>)] {
        &self.factors
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        self.factors
            .iter()
            .fold(psi.clone(), |s, (u, t)| s.apply_trusted(u, &[], t))
    }

    /// `U_δ` as a dense matrix.
    pub fn dense(&self) -> Result<CMatrix> {
        if self.qubits > EXACT_MAX_QUBITS {
            return Err(QsimError::Resource {
                requested: self.qubits,
                cap: EXACT_MAX_QUBITS,
            });
        }
        let mut u = CMatrix::identity(1 << self.qubits);
        for (f, t) in &self.factors {
            u = kernel::embed(self.qubits, f, t, &[]).matmul(&u);
        }
        Ok(u)
    }
}

/// `U_δ = [e^{-iH₁δ}⋯e^{-iH_Lδ}][e^{-iH_Lδ}⋯e^{-iH₁δ}]`
pub fn trotter_step(h: &HamiltonianTerms, delta: f64) -> Result<TrotterStep> {
    let singles: Vec<(CMatrix, Vec<usize>)> = h
        .terms
        .iter()
        .map(|t| Ok((t.matrix.exp_i_hermitian(delta)?, t.targets.clone())))
        .collect::<Result<_>>()?;
    // the rightmost factor acts first: H₁ first, up to H_L, then back down
    let mut factors = singles.clone();
    factors.extend(singles.into_iter().rev());
    Ok(TrotterStep {
        qubits: h.qubits,
        factors,
    })
}

/// States at every grid point `t_0, …, t_m`.
pub fn trotter_evolve(h: &HamiltonianTerms, plan: &TrotterPlan, psi0: &StateVector) -> Result<Vec<StateVector>> {
    check_state(h, psi0)?;
    let step = trotter_step(h, plan.delta())?;
    let mut out = Vec::with_capacity(plan.m + 1);
    out.push(psi0.clone());
    for j in 0..plan.m {
        let next = step.apply(&out[j]);
        out.push(next);
    }
    Ok(out)
}

/// `‖ψ̃(t_final) − ψ(t_final)‖₂`
pub fn trotter_error(h: &HamiltonianTerms, plan: &TrotterPlan, psi0: &StateVector) -> Result<f64> {
    let approx = trotter_evolve(h, plan, psi0)?.pop().expect("trajectory has m + 1 states");
    let exact = exact_evolve(h, plan.t_final, psi0)?;
    Ok(approx
        .amps()
        .iter()
        .zip(exact.amps())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return domain("slope needs at least two paired points");
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(QsimError::Numerical("log-log slope of non-positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Errors of single steps of each length in `deltas`, and their log-log slope.
pub fn per_step_errors(h: &HamiltonianTerms, deltas: &[f64], psi0: &StateVector) -> Result<(Vec<f64>, f64)> {
    let errs = deltas
        .iter()
        .map(|&d| trotter_error(h, &TrotterPlan::single_step(d)?, psi0))
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(deltas, &errs)?;
    Ok((errs, slope))
}

/// Terminal errors at fixed `t_final` with `m = t_final/δ` steps, and their
/// log-log slope against `δ`.
pub fn accumulated_errors(
    h: &HamiltonianTerms,
    t_final: f64,
    deltas: &[f64],
    psi0: &StateVector,
) -> Result<(Vec<f64>, f64)> {
    let errs = deltas
        .iter()
        .map(|&d| {
            let m = (t_final / d).round().max(1.0) as usize;
            trotter_error(h, &TrotterPlan::new(t_final, m)?, psi0)
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(deltas, &errs)?;
    Ok((errs, slope))
}

/// Two-qubit transverse-field chain `½X⊗I + ½Z⊗Z + ½I⊗X`; the terms do not
/// commute.
pub fn reference_model() -> HamiltonianTerms {
    use crate::linalg::paulis;
    let half = |m: CMatrix| m.scale_real(0.5);
    HamiltonianTerms::new(2)
        .and_then(|h| h.with_term(half(paulis::x()), vec![0]))
        .and_then(|h| h.with_term(half(paulis::z().kron(&paulis::z())), vec![0, 1]))
        .and_then(|h| h.with_term(half(paulis::x()), vec![1]))
        .expect("fixed valid model")
}

/// Grover search as evolution under `H = |x⟩⟨x| + |ψ⟩⟨ψ|`, restricted to the
/// plane spanned by the solution `|x⟩` and the normalized remainder `|y⟩`
/// of `|ψ⟩ = α|x⟩ + β|y⟩`. Reduced basis: `|x⟩ ↦ |0⟩`, `|y⟩ ↦ |1⟩`.
#[derive(Debug, Clone)]
pub struct GroverHamiltonian {
    pub solution: usize,
    pub alpha: f64,
    pub beta: f64,
    /// One-qubit model `I + α(βσ_x + ασ_z)` stored as the single term `H/2`.
    pub reduced: HamiltonianTerms,
    /// `(α, β)` in the reduced basis.
    pub start: StateVector,
    /// `π/(2α)`
    pub t_measure: f64,
}

impl GroverHamiltonian {
    /// Dense `|x⟩⟨x| + |ψ⟩⟨ψ|` on the full register.
    pub fn full_matrix(psi: &StateVector, x: usize) -> Result<CMatrix> {
        if psi.qubits() > EXACT_MAX_QUBITS {
            return Err(QsimError::Resource {
                requested: psi.qubits(),
                cap: EXACT_MAX_QUBITS,
            });
        }
        if x >= psi.dim() {
            return domain(format!("solution {x} outside the register"));
        }
        let mut h = CMatrix::outer(psi.amps());
        let d = h.get(x, x);
        h.set(x, x, d + crate::linalg::ONE);
        Ok(h)
    }

    /// Probability of reading `x` after evolving the reduced model for `t`.
    pub fn reduced_success(&self, t: f64) -> Result<f64> {
        Ok(exact_evolve(&self.reduced, t, &self.start)?.amp(0).norm_sqr())
    }
}

/// Build the two-level model for solution `x` and start state `psi`.
/// `⟨x|ψ⟩` must be real; a zero overlap is a degenerate problem.
pub fn grover_hamiltonian(x: usize, psi: &StateVector) -> Result<GroverHamiltonian> {
    if x >= psi.dim() {
        return domain(format!("solution {x} outside the register"));
    }
    let overlap = psi.amp(x);
    if overlap.im.abs() > crate::linalg::INPUT_TOL {
        return domain("⟨x|ψ⟩ must be real");
    }
    let alpha = overlap.re;
    if alpha.abs() < crate::linalg::INPUT_TOL {
        return Err(QsimError::Domain(
            "degenerate problem: the start state has no overlap with the solution".into(),
        ));
    }
    let rest: f64 = psi
        .amps()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != x)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    let beta = rest.sqrt();
    let term = CMatrix::from_real(&[
        &[1.0 + alpha * alpha, alpha * beta],
        &[alpha * beta, beta * beta],
    ])
    .scale_real(0.5);
    let reduced = HamiltonianTerms::new(1)?.with_term(term, vec![0])?;
    let start = StateVector::normalized(
        1,
        vec![alpha.into(), beta.into()],
    )?;
    Ok(GroverHamiltonian {
        solution: x,
        alpha,
        beta,
        reduced,
        start,
        t_measure: std::f64::consts::PI / (2.0 * alpha.abs()),
    })
}

/// [`grover_hamiltonian`] from the uniform superposition on `bits` qubits.
pub fn grover_hamiltonian_uniform(bits: usize, x: usize) -> Result<GroverHamiltonian> {
    grover_hamiltonian(x, &StateVector::uniform(bits)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::paulis;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn z_model() -> HamiltonianTerms {
        // H = 2 · ½σ_z = σ_z
        HamiltonianTerms::new(1)
            .unwrap()
            .with_term(paulis::z().scale_real(0.5), vec![0])
            .unwrap()
    }

    #[test]
    fn exact_zero_time_and_sigma_z() {
        let h = z_model();
        let psi = StateVector::random(1, &mut crate::rng::shot_rng(1, "t", 0)).unwrap();
        assert!(exact_evolve(&h, 0.0, &psi).unwrap().approx_eq(&psi));
        let zero = StateVector::basis_state(1, 0).unwrap();
        let out = exact_evolve(&h, PI, &zero).unwrap();
        assert!((out.fidelity(&zero) - 1.0).abs() < 1e-12);
        assert!((out.amp(0).re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_term_step_is_exact() {
        let h = HamiltonianTerms::new(2)
            .unwrap()
            .with_term(paulis::x().kron(&paulis::y()), vec![0, 1])
            .unwrap();
        let u = trotter_step(&h, 0.37).unwrap().dense().unwrap();
        let exact = h.dense().unwrap().exp_i_hermitian(0.37).unwrap();
        assert!(u.max_abs_diff(&exact) < 1e-12);
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn commuting_terms_factor() {
        let h = HamiltonianTerms::new(2)
            .unwrap()
            .with_term(paulis::z(), vec![0])
            .unwrap()
            .with_term(paulis::z().kron(&paulis::z()), vec![0, 1])
            .unwrap();
        assert!(h.terms_commute(1e-12).unwrap());
        let psi = StateVector::uniform(2).unwrap();
        let plan = TrotterPlan::unit(3).unwrap();
        assert!(trotter_error(&h, &plan, &psi).unwrap() < 1e-9);
    }

    #[test]
    fn one_step_trajectory() {
        let h = reference_model();
        assert!(!h.terms_commute(1e-9).unwrap());
        let psi = StateVector::basis_state(2, 0).unwrap();
        let traj = trotter_evolve(&h, &TrotterPlan::new(0.3, 1).unwrap(), &psi).unwrap();
        assert_eq!(traj.len(), 2);
        let direct = trotter_step(&h, 0.3).unwrap().apply(&psi);
        assert_eq!(traj[1], direct);
    }

    #[test]
    fn term_validation() {
        let mut h = HamiltonianTerms::new(4).unwrap();
        let big = CMatrix::identity(16);
        assert!(h.add_term(big, vec![0, 1, 2, 3]).is_err());
        assert!(h.add_term(paulis::x(), vec![0, 1]).is_err());
        assert!(h.add_term(paulis::x(), vec![4]).is_err());
        let nonherm = CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(h.add_term(nonherm, vec![0]), Err(QsimError::Validation(_))));
    }

    #[test]
    fn json_round_trip() {
        let h = reference_model();
        let back = HamiltonianTerms::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
        assert!(HamiltonianTerms::from_json(r#"{"qubits":1,"terms":[],"extra":1}"#).is_err());
    }

    #[test]
    fn grover_hamiltonian_examples() {
        let g = grover_hamiltonian_uniform(2, 3).unwrap();
        assert!((g.alpha - 0.5).abs() < 1e-15);
        assert!((g.t_measure - PI).abs() < 1e-12);
        assert!(g.reduced_success(g.t_measure).unwrap() > 1.0 - 1e-9);

        let g = grover_hamiltonian_uniform(1, 0).unwrap();
        assert!((g.alpha - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g.t_measure - PI * 2f64.sqrt() / 2.0).abs() < 1e-12);

        let zero = StateVector::basis_state(2, 1).unwrap();
        assert!(grover_hamiltonian(0, &zero).is_err());
    }

    #[test]
    fn reduced_model_matches_closed_form() {
        let g = grover_hamiltonian_uniform(3, 5).unwrap();
        let h = g.reduced.dense().unwrap();
        let (a, b) = (g.alpha, g.beta);
        let expect = &CMatrix::identity(2) + &(&paulis::x().scale_real(a * b) + &paulis::z().scale_real(a * a));
        assert!(h.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [0.1, 0.2, 0.4];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&[1.0], &[1.0]).is_err());
    }
}
