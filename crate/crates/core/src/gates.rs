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

//! Gates, circuits and Boolean oracles.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::check_qubits;
use crate::error::{domain, validation, QsimError, Result};
use crate::kernel;
use crate::linalg::{paulis, CMatrix, ONE, ZERO};
use crate::qstate::{check_placement, StateVector};

/// Oracles up to this many input bits are tabulated.
pub const ORACLE_TABLE_MAX_BITS: usize = 20;
/// Largest register for which a dense `U_f` matrix is built.
pub const DENSE_ORACLE_MAX_QUBITS: usize = 12;
/// Largest register for [`Circuit::dense_matrix`].
pub const DENSE_CIRCUIT_MAX_QUBITS: usize = 10;

/// A unitary acting on `targets`, optionally conditioned on `controls`.
///
/// Controls come before targets in [`GateOp::full_matrix`]; the block where
/// every control is `|1⟩` carries `matrix`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    name: String,
    matrix: CMatrix,
    targets: Vec<usize>,
    controls: Vec<usize>,
}

impl GateOp {
    pub fn new(name: impl Into<String>, matrix: CMatrix, targets: Vec<usize>, controls: Vec<usize>) -> Result<Self> {
        let name = name.into();
        if matrix.dim() != 1 << targets.len() {
            return domain(format!(
                "gate {name}: {}x{} matrix on {} targets",
                matrix.dim(),
                matrix.dim(),
                targets.len()
            ));
        }
        let span = targets.iter().chain(&controls).max().map_or(0, |&m| m + 1);
        check_placement(span, &targets, &controls)?;
        matrix.ensure_unitary(&format!("gate {name}"))?;
        Ok(GateOp {
            name,
            matrix,
            targets,
            controls,
        })
    }

    fn known(name: &str, matrix: CMatrix, targets: Vec<usize>, controls: Vec<usize>) -> Self {
        GateOp {
            name: name.to_string(),
            matrix,
            targets,
            controls,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    /// Largest qubit index touched, plus one.
    pub fn span(&self) -> usize {
        self.targets
            .iter()
            .chain(&self.controls)
            .max()
            .map_or(0, |&m| m + 1)
    }

    /// Operator on `controls ++ targets`, block diagonal `[[I, 0], [0, U]]`
    /// for a single control.
    pub fn full_matrix(&self) -> CMatrix {
        let k = self.controls.len() + self.targets.len();
        let local_targets: Vec<usize> = (self.controls.len()..k).collect();
        let local_controls: Vec<usize> = (0..self.controls.len()).collect();
        kernel::embed(k, &self.matrix, &local_targets, &local_controls)
    }

    /// Add one more control qubit.
    pub fn controlled_by(&self, control: usize) -> Result<GateOp> {
        let mut controls = vec![control];
        controls.extend_from_slice(&self.controls);
        GateOp::new(format!("C{}", self.name), self.matrix.clone(), self.targets.clone(), controls)
    }

    /// Same placement, adjoint matrix.
    pub fn inverse(&self) -> GateOp {
        let name = if is_self_inverse(&self.name) {
            self.name.clone()
        } else if let Some(stripped) = self.name.strip_suffix('†') {
            stripped.to_string()
        } else {
            format!("{}†", self.name)
        };
        GateOp::known(&name, self.matrix.adjoint(), self.targets.clone(), self.controls.clone())
    }

    /// Move the gate to other qubits: qubit `q` becomes `map[q]`.
    pub fn relabeled(&self, map: &[usize]) -> Result<GateOp> {
        let remap = |v: &[usize]| -> Result<Vec<usize>> {
            v.iter()
                .map(|&q| {
                    map.get(q)
                        .copied()
                        .ok_or_else(|| QsimError::Domain(format!("no relabeling for qubit {q}")))
                })
                .collect()
        };
        GateOp::new(self.name.clone(), self.matrix.clone(), remap(&self.targets)?, remap(&self.controls)?)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.span() > state.qubits() {
            return domain(format!(
                "gate {} touches qubit {} of a {}-qubit state",
                self.name,
                self.span() - 1,
                state.qubits()
            ));
        }
        Ok(state.apply_trusted(&self.matrix, &self.controls, &self.targets))
    }
}

fn is_self_inverse(name: &str) -> bool {
    matches!(name, "H" | "X" | "Y" | "Z" | "CNOT" | "SWAP")
}

fn named_matrix(name: &str) -> Option<CMatrix> {
    match name {
        "H" => Some(paulis::h()),
        "X" | "CNOT" => Some(paulis::x()),
        "Y" => Some(paulis::y()),
        "Z" => Some(paulis::z()),
        "SWAP" => Some(swap_matrix()),
        _ => None,
    }
}

fn swap_matrix() -> CMatrix {
    CMatrix::from_real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

pub fn hadamard(target: usize) -> GateOp {
    GateOp::known("H", paulis::h(), vec![target], vec![])
}

pub fn pauli_x(target: usize) -> GateOp {
    GateOp::known("X", paulis::x(), vec![target], vec![])
}

pub fn pauli_y(target: usize) -> GateOp {
    GateOp::known("Y", paulis::y(), vec![target], vec![])
}

pub fn pauli_z(target: usize) -> GateOp {
    GateOp::known("Z", paulis::z(), vec![target], vec![])
}

/// Flips `target` when `control` is `|1⟩`.
pub fn cnot(control: usize, target: usize) -> Result<GateOp> {
    if control == target {
        return domain("CNOT control and target coincide");
    }
    Ok(GateOp::known("CNOT", paulis::x(), vec![target], vec![control]))
}

pub fn swap(a: usize, b: usize) -> Result<GateOp> {
    if a == b {
        return domain("SWAP of a qubit with itself");
    }
    Ok(GateOp::known("SWAP", swap_matrix(), vec![a, b], vec![]))
}

/// `diag(1, e^{iθ})`
pub fn phase(theta: f64, target: usize) -> GateOp {
    GateOp::known(
        &format!("P({theta})"),
        CMatrix::diagonal(&[ONE, Complex64::from_polar(1.0, theta)]),
        vec![target],
        vec![],
    )
}

/// Control-U: `u` runs only when `control` is `|1⟩`.
pub fn controlled(u: &GateOp, control: usize) -> Result<GateOp> {
    u.controlled_by(control)
}

/// Circuit on a fixed number of qubits; ops run in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: usize,
    ops: Vec<GateOp>,
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    name: String,
    targets: Vec<usize>,
    #[serde(default)]
    controls: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
}

pub(crate) fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    m.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

pub(crate) fn matrix_from_pairs(pairs: &[[f64; 2]]) -> Result<CMatrix> {
    CMatrix::from_vec(pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
}

impl Circuit {
    pub fn new(qubits: usize) -> Result<Self> {
        if qubits == 0 {
            return domain("a circuit needs at least one qubit");
        }
        check_qubits(qubits)?;
        Ok(Circuit { qubits, ops: vec![] })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        if op.span() > self.qubits {
            return domain(format!(
                "gate {} touches qubit {} of a {}-qubit circuit",
                op.name,
                op.span() - 1,
                self.qubits
            ));
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn extend<I: IntoIterator<Item = GateOp>>(&mut self, ops: I) -> Result<&mut Self> {
        for op in ops {
            self.push(op)?;
        }
        Ok(self)
    }

    /// Apply every op in order.
    pub fn run(&self, input: &StateVector) -> Result<StateVector> {
        if input.qubits() != self.qubits {
            return domain(format!(
                "{}-qubit circuit on a {}-qubit state",
                self.qubits,
                input.qubits()
            ));
        }
        let mut state = input.clone();
        for op in &self.ops {
            state = op.apply(&state)?;
        }
        Ok(state)
    }

    /// Reversed order, adjoint gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            qubits: self.qubits,
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
        }
    }

    /// Product of embedded gate matrices. Only for small registers.
    pub fn dense_matrix(&self) -> Result<CMatrix> {
        if self.qubits > DENSE_CIRCUIT_MAX_QUBITS {
            return Err(QsimError::Resource {
                requested: self.qubits,
                cap: DENSE_CIRCUIT_MAX_QUBITS,
            });
        }
        let mut acc = CMatrix::identity(1 << self.qubits);
        for op in &self.ops {
            let g = kernel::embed(self.qubits, &op.matrix, &op.targets, &op.controls);
            acc = g.matmul(&acc);
        }
        Ok(acc)
    }

    /// JSON list of `{name, targets, controls, matrix?}`; named gates omit
    /// the matrix.
    pub fn to_json(&self) -> String {
        let list: Vec<GateJson> = self
            .ops
            .iter()
            .map(|op| GateJson {
                name: op.name.clone(),
                targets: op.targets.clone(),
                controls: op.controls.clone(),
                matrix: if named_matrix(&op.name).is_some() {
                    None
                } else {
                    Some(matrix_to_pairs(&op.matrix))
                },
            })
            .collect();
        serde_json::to_string(&list).expect("circuit serialization")
    }

    pub fn from_json(qubits: usize, s: &str) -> Result<Self> {
        let list: Vec<GateJson> =
            serde_json::from_str(s).map_err(|e| QsimError::Validation(format!("circuit JSON: {e}")))?;
        let mut c = Circuit::new(qubits)?;
        for g in list {
            let matrix = match (&g.matrix, named_matrix(&g.name)) {
                (Some(pairs), _) => matrix_from_pairs(pairs)?,
                (None, Some(m)) => m,
                (None, None) => return validation(format!("gate {} needs a matrix", g.name)),
            };
            c.push(GateOp::new(g.name, matrix, g.targets, g.controls)?)?;
        }
        Ok(c)
    }
}

/// Apply `c` to `input`.
pub fn run_circuit(c: &Circuit, input: &StateVector) -> Result<StateVector> {
    c.run(input)
}

/// `H` on every qubit.
pub fn hadamard_layer_circuit(qubits: usize) -> Result<Circuit> {
    let mut c = Circuit::new(qubits)?;
    c.extend((0..qubits).map(hadamard))?;
    Ok(c)
}

/// `H^{⊗b}|0…0⟩ = 2^{-b/2} Σ_x |x⟩`
pub fn hadamard_layer(qubits: usize) -> Result<StateVector> {
    hadamard_layer_circuit(qubits)?.run(&StateVector::basis_state(qubits, 0)?)
}

/// Boolean function on `b` input bits. Input `x` is read with the first
/// qubit as its most significant bit.
#[derive(Clone)]
pub struct BooleanOracle {
    bits: usize,
    repr: OracleRepr,
}

#[derive(Clone)]
enum OracleRepr {
    Table(Vec<bool>),
    Predicate(Arc<dyn Fn(usize) -> bool + Send + Sync>),
}

impl fmt::Debug for BooleanOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            OracleRepr::Table(t) => write!(
                f,
                "BooleanOracle {{ bits: {}, table: {} marked }}",
                self.bits,
                t.iter().filter(|&&b| b).count()
            ),
            OracleRepr::Predicate(_) => write!(f, "BooleanOracle {{ bits: {}, predicate }}", self.bits),
        }
    }
}

impl BooleanOracle {
    /// Tabulated when `bits ≤ 20`, evaluated on demand otherwise.
    pub fn from_fn<F>(bits: usize, f: F) -> Result<Self>
    where
        F: Fn(usize) -> bool + Send + Sync + 'static,
    {
        if bits == 0 || bits > 62 {
            return domain(format!("oracle on {bits} bits"));
        }
        let repr = if bits <= ORACLE_TABLE_MAX_BITS {
            OracleRepr::Table((0..1usize << bits).map(f).collect())
        } else {
            OracleRepr::Predicate(Arc::new(f))
        };
        Ok(BooleanOracle { bits, repr })
    }

    pub fn from_table(table: Vec<bool>) -> Result<Self> {
        if table.len() < 2 || !table.len().is_power_of_two() {
            return domain(format!("oracle table of length {}", table.len()));
        }
        let bits = table.len().trailing_zeros() as usize;
        Ok(BooleanOracle {
            bits,
            repr: OracleRepr::Table(table),
        })
    }

    /// Marks exactly the listed inputs.
    pub fn marking(bits: usize, marked: &[usize]) -> Result<Self> {
        if bits == 0 || bits > ORACLE_TABLE_MAX_BITS {
            return domain(format!("marking oracle on {bits} bits"));
        }
        let mut table = vec![false; 1 << bits];
        for &m in marked {
            if m >= table.len() {
                return domain(format!("marked input {m} out of range"));
            }
            table[m] = true;
        }
        Self::from_table(table)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn domain_size(&self) -> usize {
        1 << self.bits
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        match &self.repr {
            OracleRepr::Table(t) => t[x],
            OracleRepr::Predicate(f) => f(x),
        }
    }

    /// Exhaustive count of marked inputs.
    pub fn count(&self) -> usize {
        match &self.repr {
            OracleRepr::Table(t) => t.iter().filter(|&&b| b).count(),
            OracleRepr::Predicate(f) => (0..self.domain_size()).filter(|&x| f(x)).count(),
        }
    }

    pub fn solutions(&self) -> Vec<usize> {
        (0..self.domain_size()).filter(|&x| self.eval(x)).collect()
    }
}

/// `U_f|x, y⟩ = |x, y ⊕ f(x)⟩` on `b + 1` qubits, target last.
pub fn oracle_uf(f: &BooleanOracle) -> Result<GateOp> {
    let qubits = f.bits() + 1;
    if qubits > DENSE_ORACLE_MAX_QUBITS {
        return Err(QsimError::Resource {
            requested: qubits,
            cap: DENSE_ORACLE_MAX_QUBITS,
        });
    }
    let dim = 1usize << qubits;
    let mut m = CMatrix::zeros(dim);
    for col in 0..dim {
        let x = col >> 1;
        let row = if f.eval(x) { col ^ 1 } else { col };
        m.set(row, col, ONE);
    }
    Ok(GateOp::known("Uf", m, (0..qubits).collect(), vec![]))
}

/// Multiply amplitude `x` by `-1` wherever `f(x) = 1`, with `f` reading the
/// whole register.
pub fn phase_flip(state: &StateVector, f: &BooleanOracle) -> Result<StateVector> {
    if f.bits() != state.qubits() {
        return domain(format!(
            "{}-bit oracle on a {}-qubit register",
            f.bits(),
            state.qubits()
        ));
    }
    let amps = state
        .amps()
        .iter()
        .enumerate()
        .map(|(x, &z)| if f.eval(x) { -z } else { z })
        .collect();
    Ok(StateVector::from_raw(state.qubits(), amps))
}

#[allow(dead_code)]
fn is_permutation(m: &CMatrix) -> bool {
    let n = m.dim();
    (0..n).all(|r| {
        let row = m.row(r);
        row.iter().filter(|&&z| z == ONE).count() == 1 && row.iter().all(|&z| z == ONE || z == ZERO)
    }) && (0..n).all(|c| (0..n).filter(|&r| m.get(r, c) == ONE).count() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn hadamard_on_one() {
        let s = hadamard(0).apply(&StateVector::basis_state(1, 1).unwrap()).unwrap();
        assert!((s.amp(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amp(1).re + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn single_qubit_algebra() {
        let h = paulis::h();
        assert!(h.matmul(&h).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
        let xyz = paulis::x().matmul(&paulis::y()).matmul(&paulis::z());
        let i_id = CMatrix::identity(2).scale(Complex64::new(0.0, 1.0));
        assert!(xyz.max_abs_diff(&i_id) < 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        let g = cnot(0, 1).unwrap();
        for (input, output) in [(0b00, 0b00), (0b01, 0b01), (0b10, 0b11), (0b11, 0b10)] {
            let s = g.apply(&StateVector::basis_state(2, input).unwrap()).unwrap();
            assert_eq!(s, StateVector::basis_state(2, output).unwrap());
        }
        let m = g.full_matrix();
        assert!(m.matmul(&m).max_abs_diff(&CMatrix::identity(4)) < 1e-15);
        assert!(cnot(1, 1).is_err());
    }

    #[test]
    fn controlled_x_is_cnot() {
        let cx = controlled(&pauli_x(1), 0).unwrap();
        assert_eq!(cx.full_matrix(), cnot(0, 1).unwrap().full_matrix());
        let expected = CMatrix::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        assert_eq!(cx.full_matrix(), expected);
    }

    #[test]
    fn controlled_leaves_control_zero_alone() {
        let u = GateOp::new("U", paulis::h().matmul(&paulis::y()), vec![1], vec![]).unwrap();
        let cu = controlled(&u, 0).unwrap();
        let psi = StateVector::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        let input = StateVector::basis_state(1, 0).unwrap().tensor(&psi).unwrap();
        assert_eq!(cu.apply(&input).unwrap(), input);
        assert!(cu.full_matrix().is_unitary(1e-12));
    }

    #[test]
    fn controlled_rejects_overlap() {
        assert!(controlled(&pauli_x(0), 0).is_err());
    }

    #[test]
    fn custom_gate_validation() {
        let bad = CMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(GateOp::new("bad", bad, vec![0], vec![]), Err(QsimError::Validation(_))));
        assert!(GateOp::new("I", CMatrix::identity(4), vec![0], vec![]).is_err());
    }

    #[test]
    fn oracle_examples() {
        let zero = BooleanOracle::from_fn(2, |_| false).unwrap();
        assert_eq!(oracle_uf(&zero).unwrap().matrix(), &CMatrix::identity(8));

        // f(x) = first input bit: CNOT from qubit 0 onto the target
        let first = BooleanOracle::from_fn(2, |x| x >> 1 == 1).unwrap();
        let uf = oracle_uf(&first).unwrap();
        let cx = kernel::embed(3, &paulis::x(), &[2], &[0]);
        assert_eq!(uf.matrix(), &cx);

        let f = BooleanOracle::from_table(vec![true, false, true, true, false, false, true, false]).unwrap();
        let m = oracle_uf(&f).unwrap();
        assert!(is_permutation(m.matrix()));
        assert_eq!(m.matrix().matmul(m.matrix()), CMatrix::identity(16));
    }

    #[test]
    fn hadamard_layer_examples() {
        let one = hadamard_layer(1).unwrap();
        assert!(one.amps().iter().all(|z| (z.re - FRAC_1_SQRT_2).abs() < 1e-15));
        let three = hadamard_layer(3).unwrap();
        let a = 1.0 / 8f64.sqrt();
        assert!(three.amps().iter().all(|z| (z.re - a).abs() < 1e-15 && z.im == 0.0));
    }

    #[test]
    fn parallel_evaluation_of_f() {
        let f = BooleanOracle::from_table(vec![false, true, true, false, true, true, false, true]).unwrap();
        let input = hadamard_layer(3).unwrap().tensor(&StateVector::basis_state(1, 0).unwrap()).unwrap();
        let out = oracle_uf(&f).unwrap().apply(&input).unwrap();
        let a = 1.0 / 8f64.sqrt();
        for x in 0..8 {
            let fx = f.eval(x) as usize;
            assert!((out.amp(2 * x + fx).re - a).abs() < 1e-15);
            assert_eq!(out.amp(2 * x + (1 - fx)), ZERO);
        }
    }

    #[test]
    fn bell_circuit() {
        let mut c = Circuit::new(2).unwrap();
        c.push(hadamard(0)).unwrap().push(cnot(0, 1).unwrap()).unwrap();
        let out = run_circuit(&c, &StateVector::basis_state(2, 0).unwrap()).unwrap();
        assert!((out.amp(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amp(3).re - FRAC_1_SQRT_2).abs() < 1e-15);
        let empty = Circuit::new(2).unwrap();
        let s = StateVector::basis_state(2, 2).unwrap();
        assert_eq!(empty.run(&s).unwrap(), s);
    }

    #[test]
    fn circuit_rejects_out_of_range_gate() {
        let mut c = Circuit::new(2).unwrap();
        assert!(c.push(hadamard(2)).is_err());
        assert!(c.run(&StateVector::basis_state(3, 0).unwrap()).is_err());
    }

    #[test]
    fn json_round_trip_keeps_named_and_custom_gates() {
        let mut c = Circuit::new(3).unwrap();
        c.push(hadamard(0)).unwrap();
        c.push(cnot(0, 2).unwrap()).unwrap();
        c.push(controlled(&phase(0.3, 1), 2).unwrap()).unwrap();
        c.push(swap(0, 1).unwrap()).unwrap();
        let json = c.to_json();
        assert!(json.contains("{\"name\":\"H\",\"targets\":[0],\"controls\":[]}"));
        assert!(json.contains("\"matrix\""));
        let back = Circuit::from_json(3, &json).unwrap();
        assert_eq!(back, c);
        assert!(Circuit::from_json(3, r#"[{"name":"mystery","targets":[0]}]"#).is_err());
    }
}
