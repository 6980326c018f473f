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

//! State-vector quantum computation simulator and experiment procedures.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex matrices and a cyclic Jacobi eigensolver.
//! - [`kernel`]: the strided gate kernel over the amplitude array.
//! - [`qstate`]: pure states, density matrices, observables, measurement.
//! - [`gates`]: gate constructors, circuits, Boolean oracles.
//! - [`entangle`]: Bell states, anti-correlation, teleportation, CHSH.
//! - [`algorithms`]: QFT, phase estimation, Grover search and counting, order finding.
//! - [`hamsim`]: symmetric Trotter evolution and its dense oracle.
//! - [`statharness`]: repetition, trimmed means, Monte Carlo estimation, random bits.
//! - [`qec`]: bit-flip, phase-flip and nine-qubit codes.
//!
//! Sampling always goes through explicitly seeded streams from [`rng`], so
//! results do not depend on thread scheduling. Data-parallel loops run on
//! rayon when the `parallel` feature is enabled (the default).

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod config;
pub mod entangle;
pub mod error;
pub mod gates;
pub mod hamsim;
pub mod kernel;
pub mod linalg;
pub mod parallel;
pub mod qec;
pub mod qstate;
pub mod rng;
pub mod statharness;

pub use error::{QsimError, Result};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use parallel::Exec;
pub use qstate::{DensityMatrix, Observable, QuantumState, StateVector};
