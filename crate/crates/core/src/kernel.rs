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

//! Strided gate kernel over the amplitude array.
//!
//! Qubit 0 is the most significant bit of the basis index. Within a gate
//! matrix, `targets[0]` is the most significant bit of the row index. The
//! embedded `2^b × 2^b` operator is never materialized: each output
//! amplitude gathers the `2^k` inputs that share its non-target bits.

use num_complex::Complex64;

use crate::linalg::{CMatrix, ZERO};
use crate::parallel::{fill_indexed, Exec};

/// States smaller than this are always processed sequentially.
pub const PAR_MIN_DIM: usize = 1 << 12;

/// Precomputed index arithmetic for one gate placement.
#[derive(Debug, Clone)]
pub struct Placement {
    shifts: Vec<u32>,
    target_mask: usize,
    control_mask: usize,
    offsets: Vec<usize>,
}

impl Placement {
    /// Assumes indices were validated (distinct, in range).
    pub fn new(qubits: usize, targets: &[usize], controls: &[usize]) -> Self {
        let shifts: Vec<u32> = targets.iter().map(|&t| (qubits - 1 - t) as u32).collect();
        let target_mask = shifts.iter().fold(0usize, |m, &s| m | (1 << s));
        let control_mask = controls
            .iter()
            .fold(0usize, |m, &c| m | (1 << (qubits - 1 - c)));
        let k = targets.len();
        let offsets = (0..1usize << k)
            .map(|j| {
                shifts.iter().enumerate().fold(0usize, |acc, (pos, &s)| {
                    if (j >> (k - 1 - pos)) & 1 == 1 {
                        acc | (1 << s)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Placement {
            shifts,
            target_mask,
            control_mask,
            offsets,
        }
    }

    /// Row of the gate matrix addressed by basis index `i`.
    #[inline]
    pub fn row_of(&self, i: usize) -> usize {
        let k = self.shifts.len();
        self.shifts
            .iter()
            .enumerate()
            .fold(0usize, |acc, (pos, &s)| acc | (((i >> s) & 1) << (k - 1 - pos)))
    }

    #[inline]
    fn active(&self, i: usize) -> bool {
        i & self.control_mask == self.control_mask
    }
}

fn diagonal_of(matrix: &CMatrix) -> Option<Vec<Complex64>> {
    let n = matrix.dim();
    for r in 0..n {
        for c in 0..n {
            if r != c && matrix.get(r, c) != ZERO {
                return None;
            }
        }
    }
    Some((0..n).map(|i| matrix.get(i, i)).collect())
}

/// Apply `matrix` on `targets`, conditioned on every qubit in `controls`
/// being `|1⟩`. Returns the new amplitude array.
pub fn apply(
    exec: Exec,
    qubits: usize,
    amps: &[Complex64],
    matrix: &CMatrix,
    targets: &[usize],
    controls: &[usize],
) -> Vec<Complex64> {
    debug_assert_eq!(amps.len(), 1 << qubits);
    debug_assert_eq!(matrix.dim(), 1 << targets.len());
    let exec = if amps.len() >= PAR_MIN_DIM { exec } else { Exec::Sequential };
    apply_forced(exec, qubits, amps, matrix, targets, controls)
}

/// Sequential entry point, used by benches and equivalence tests.
pub fn apply_sequential(
    qubits: usize,
    amps: &[Complex64],
    matrix: &CMatrix,
    targets: &[usize],
    controls: &[usize],
) -> Vec<Complex64> {
    apply_forced(Exec::Sequential, qubits, amps, matrix, targets, controls)
}

/// Parallel entry point that ignores [`PAR_MIN_DIM`].
pub fn apply_parallel(
    qubits: usize,
    amps: &[Complex64],
    matrix: &CMatrix,
    targets: &[usize],
    controls: &[usize],
) -> Vec<Complex64> {
    apply_forced(Exec::Parallel, qubits, amps, matrix, targets, controls)
}

fn apply_forced(
    exec: Exec,
    qubits: usize,
    amps: &[Complex64],
    matrix: &CMatrix,
    targets: &[usize],
    controls: &[usize],
) -> Vec<Complex64> {
    let place = Placement::new(qubits, targets, controls);
    let mut out = vec![ZERO; amps.len()];

    if let Some(diag) = diagonal_of(matrix) {
        fill_indexed(exec, &mut out, |i| {
            if place.active(i) {
                diag[place.row_of(i)] * amps[i]
            } else {
                amps[i]
            }
        });
        return out;
    }

    fill_indexed(exec, &mut out, |i| {
        if !place.active(i) {
            return amps[i];
        }
        let row = matrix.row(place.row_of(i));
        let base = i & !place.target_mask;
        let mut acc = ZERO;
        for (m, &off) in row.iter().zip(&place.offsets) {
            acc += m * amps[base | off];
        }
        acc
    });
    out
}

/// Dense `2^b × 2^b` operator equal to the kernel's action. Test oracle and
/// Hamiltonian assembly only.
pub fn embed(qubits: usize, matrix: &CMatrix, targets: &[usize], controls: &[usize]) -> CMatrix {
    let dim = 1usize << qubits;
    let mut out = CMatrix::zeros(dim);
    let mut basis = vec![ZERO; dim];
    for col in 0..dim {
        basis.iter_mut().for_each(|z| *z = ZERO);
        basis[col] = Complex64::new(1.0, 0.0);
        let image = apply(Exec::Sequential, qubits, &basis, matrix, targets, controls);
        for (row, z) in image.into_iter().enumerate() {
            out.set(row, col, z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::paulis;

    fn basis(dim: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; dim];
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn x_on_msb_flips_high_bit() {
        let out = apply(Exec::Sequential, 3, &basis(8, 0b001), &paulis::x(), &[0], &[]);
        assert_eq!(out, basis(8, 0b101));
    }

    #[test]
    fn controlled_x_respects_control() {
        let x = paulis::x();
        assert_eq!(apply(Exec::Sequential, 2, &basis(4, 0b10), &x, &[1], &[0]), basis(4, 0b11));
        assert_eq!(apply(Exec::Sequential, 2, &basis(4, 0b01), &x, &[1], &[0]), basis(4, 0b01));
    }

    #[test]
    fn embed_matches_kron_for_adjacent_targets() {
        let u = paulis::h().kron(&paulis::y());
        let direct = CMatrix::identity(2).kron(&u);
        assert!(embed(3, &u, &[1, 2], &[]).max_abs_diff(&direct) < 1e-15);
        // reversed target order is the swapped operator
        let swapped = CMatrix::identity(2).kron(&paulis::y().kron(&paulis::h()));
        assert!(embed(3, &u, &[2, 1], &[]).max_abs_diff(&swapped) < 1e-15);
    }

    #[test]
    fn sequential_and_parallel_are_bit_identical() {
        let qubits = 13;
        let amps: Vec<Complex64> = (0..1usize << qubits)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let u = paulis::h().kron(&paulis::y()).kron(&paulis::h());
        let a = apply_sequential(qubits, &amps, &u, &[4, 0, 9], &[2]);
        let b = apply_parallel(qubits, &amps, &u, &[4, 0, 9], &[2]);
        assert_eq!(a, b);
        let c = apply(Exec::Parallel, qubits, &amps, &u, &[4, 0, 9], &[2]);
        assert_eq!(a, c);
    }
}
