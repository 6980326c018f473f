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

//! Dense complex matrices and the Hermitian eigensolver.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{validation, QsimError, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Entrywise tolerance for validated unitary/Hermitian inputs.
pub const INPUT_TOL: f64 = 1e-10;
/// Tolerance for quantities derived through accumulated arithmetic.
pub const DERIVED_TOL: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this.
pub const JACOBI_THRESHOLD: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim.min(16) {
            let row: Vec<String> = (0..self.dim.min(16))
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Build from row-major entries; `data.len()` must be a perfect square.
    pub fn from_vec(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() || dim == 0 {
            return validation(format!("{} entries do not form a square matrix", data.len()));
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_real(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "row {r} has the wrong length");
            for (c, &v) in row.iter().enumerate() {
                m.data[r * dim + c] = Complex64::new(v, 0.0);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return validation("ragged matrix rows");
        }
        Self::from_vec(rows.iter().flatten().copied().collect())
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = v[r] * v[c].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// log2 of the dimension, if it is a power of two.
    pub fn qubits(&self) -> Option<usize> {
        if self.dim.is_power_of_two() {
            Some(self.dim.trailing_zeros() as usize)
        } else {
            None
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the high bits.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut m = Self::zeros(n);
        for r1 in 0..a {
            for c1 in 0..a {
                let x = self.get(r1, c1);
                if x == ZERO {
                    continue;
                }
                for r2 in 0..b {
                    for c2 in 0..b {
                        m.data[(r1 * b + r2) * n + c1 * b + c2] = x * other.get(r2, c2);
                    }
                }
            }
        }
        m
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let x = self.data[r * n + k];
                if x == ZERO {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let mrow = &mut m.data[r * n..(r + 1) * n];
                for (dst, &y) in mrow.iter_mut().zip(orow) {
                    *dst += x * y;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in mul_vec");
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> CMatrix {
        let mut base = self.clone();
        let mut acc = CMatrix::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        acc
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entrywise `‖U†U − I‖∞`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&CMatrix::identity(self.dim))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Hermitian projector check: `P = P†` and `P² = P`.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.matmul(self).max_abs_diff(self) < tol
    }

    pub fn ensure_unitary(&self, what: &str) -> Result<()> {
        if !self.is_finite() {
            return validation(format!("{what}: non-finite entries"));
        }
        let d = self.unitarity_defect();
        if d >= INPUT_TOL {
            return validation(format!("{what}: not unitary (|U†U - I| = {d:e})"));
        }
        Ok(())
    }

    pub fn ensure_hermitian(&self, what: &str) -> Result<()> {
        if !self.is_finite() {
            return validation(format!("{what}: non-finite entries"));
        }
        let d = self.hermiticity_defect();
        if d >= INPUT_TOL {
            return validation(format!("{what}: not Hermitian (|A - A†| = {d:e})"));
        }
        Ok(())
    }

    /// Eigendecomposition of a Hermitian matrix; see [`HermitianEigen`].
    pub fn eigh(&self) -> Result<HermitianEigen> {
        HermitianEigen::new(self)
    }

    /// `f(A) = V f(Λ) V†` for Hermitian `A`.
    pub fn hermitian_function<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<CMatrix> {
        Ok(self.eigh()?.reconstruct_with(f))
    }

    /// `exp(-i A t)` for Hermitian `A`.
    pub fn exp_i_hermitian(&self, t: f64) -> Result<CMatrix> {
        self.hermitian_function(|lambda| Complex64::from_polar(1.0, -lambda * t))
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Spectral decomposition `A = V diag(λ) V†` of a Hermitian matrix,
/// eigenvalues in ascending order, eigenvectors in the columns of `V`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Cyclic complex Jacobi.
    ///
    /// Each rotation first rephases the `(p, q)` pair so `a_pq` becomes real,
    /// then applies the real symmetric Jacobi rotation that annihilates it.
    pub fn new(a: &CMatrix) -> Result<Self> {
        a.ensure_hermitian("eigh input")?;
        let n = a.dim;
        let mut m = a.clone();
        // symmetrize away the sub-tolerance residue
        for r in 0..n {
            m.data[r * n + r].im = 0.0;
            for c in r + 1..n {
                let avg = (m.get(r, c) + m.get(c, r).conj()) * 0.5;
                m.set(r, c, avg);
                m.set(c, r, avg.conj());
            }
        }
        let mut v = CMatrix::identity(n);

        let off_norm = |m: &CMatrix| -> f64 {
            let mut s = 0.0;
            for r in 0..n {
                for c in 0..n {
                    if r != c {
                        s += m.get(r, c).norm_sqr();
                    }
                }
            }
            s.sqrt()
        };

        let scale = a.frobenius_norm().max(1.0);
        let mut sweeps = 0;
        while off_norm(&m) >= JACOBI_THRESHOLD {
            if sweeps == JACOBI_MAX_SWEEPS {
                // relative floor for large-norm inputs
                if off_norm(&m) < 1e-14 * scale {
                    break;
                }
                return Err(QsimError::Numerical(format!(
                    "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal {:e})",
                    off_norm(&m)
                )));
            }
            sweeps += 1;
            for p in 0..n {
                for q in p + 1..n {
                    let apq = m.get(p, q);
                    let mag = apq.norm();
                    if mag < 1e-300 {
                        continue;
                    }
                    let w = apq / mag;
                    let app = m.get(p, p).re;
                    let aqq = m.get(q, q).re;
                    let tau = (aqq - app) / (2.0 * mag);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // J = diag-phase · rotation, restricted to (p, q)
                    let jpp = Complex64::new(c, 0.0);
                    let jpq = Complex64::new(s, 0.0);
                    let jqp = w.conj() * (-s);
                    let jqq = w.conj() * c;
                    // A <- A J
                    for k in 0..n {
                        let akp = m.get(k, p);
                        let akq = m.get(k, q);
                        m.set(k, p, akp * jpp + akq * jqp);
                        m.set(k, q, akp * jpq + akq * jqq);
                    }
                    // A <- J† A
                    for k in 0..n {
                        let apk = m.get(p, k);
                        let aqk = m.get(q, k);
                        m.set(p, k, jpp.conj() * apk + jqp.conj() * aqk);
                        m.set(q, k, jpq.conj() * apk + jqq.conj() * aqk);
                    }
                    m.set(p, q, ZERO);
                    m.set(q, p, ZERO);
                    m.data[p * n + p].im = 0.0;
                    m.data[q * n + q].im = 0.0;
                    // V <- V J
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, vkp * jpp + vkq * jqp);
                        v.set(k, q, vkp * jpq + vkq * jqq);
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| m.get(i, i).re.total_cmp(&m.get(j, j).re));
        let values = order.iter().map(|&i| m.get(i, i).re).collect();
        let mut vectors = CMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                vectors.set(r, new_col, v.get(r, old_col));
            }
        }
        Ok(HermitianEigen { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|r| self.vectors.get(r, k)).collect()
    }

    /// `V diag(f(λ)) V†`
    pub fn reconstruct_with<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let n = self.dim();
        let fl: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for (k, &w) in fl.iter().enumerate() {
                    acc += self.vectors.get(r, k) * w * self.vectors.get(c, k).conj();
                }
                out.set(r, c, acc);
            }
        }
        out
    }
}

/// Standard single-qubit matrices.
pub mod paulis {
    use super::*;

    pub fn identity() -> CMatrix {
        CMatrix::identity(2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_vec(vec![ZERO, -I, I, ZERO]).expect("2x2")
    }

    pub fn z() -> CMatrix {
        CMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    pub fn h() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_real(&[&[s, s], &[s, -s]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        // small LCG keeps this test free of the rng module
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = CMatrix::zeros(n);
        for r in 0..n {
            m.set(r, r, Complex64::new(next(), 0.0));
            for c in r + 1..n {
                let z = Complex64::new(next(), next());
                m.set(r, c, z);
                m.set(c, r, z.conj());
            }
        }
        m
    }

    #[test]
    fn jacobi_reconstructs_random_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (8, 4), (16, 5)] {
            let a = random_hermitian(n, seed);
            let e = a.eigh().unwrap();
            let back = e.reconstruct_with(|l| Complex64::new(l, 0.0));
            assert!(back.max_abs_diff(&a) < 1e-10, "n={n}");
            assert!(e.vectors.is_unitary(1e-10));
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn pauli_spectra() {
        for p in [paulis::x(), paulis::y(), paulis::z()] {
            let e = p.eigh().unwrap();
            assert!((e.values[0] + 1.0).abs() < 1e-12);
            assert!((e.values[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let a = CMatrix::identity(4).scale_real(3.0);
        let e = a.eigh().unwrap();
        assert!(e.values.iter().all(|&l| (l - 3.0).abs() < 1e-14));
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(a.eigh(), Err(QsimError::Validation(_))));
    }

    #[test]
    fn exp_of_pauli_z() {
        let u = paulis::z().exp_i_hermitian(std::f64::consts::PI / 2.0).unwrap();
        // exp(-i π/2 Z) = diag(-i, i)
        assert!((u.get(0, 0) + I).norm() < 1e-12);
        assert!((u.get(1, 1) - I).norm() < 1e-12);
    }

    #[test]
    fn kron_ordering_puts_left_factor_high() {
        let m = paulis::x().kron(&CMatrix::identity(2));
        // |00> -> |10>
        assert_eq!(m.get(2, 0), ONE);
        assert_eq!(m.get(0, 0), ZERO);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let u = paulis::h().matmul(&paulis::z()).matmul(&paulis::y());
        let mut acc = CMatrix::identity(2);
        for _ in 0..13 {
            acc = acc.matmul(&u);
        }
        assert!(u.pow(13).max_abs_diff(&acc) < 1e-12);
        assert!(u.pow(0).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }
}
