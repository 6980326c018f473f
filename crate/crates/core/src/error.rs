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

use thiserror::Error;

/// Errors produced by the simulator and the experiment procedures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    /// An argument is outside the domain of the operation (bad index, bad qubit list, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// An input failed a structural check (unitarity, hermiticity, normalization, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// A precondition of a statistical procedure is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The requested register exceeds the configured qubit cap.
    #[error("resource error: {requested} qubits requested, cap is {cap}")]
    Resource { requested: usize, cap: usize },
    /// A quantity that must be real carried a large imaginary part, or similar.
    #[error("numerical consistency error: {0}")]
    Numerical(String),
    /// Conditioning on a measurement outcome of (numerically) zero probability.
    #[error("conditioning on a null event (probability {0:e})")]
    NullEvent(f64),
    /// A procedure was asked to aggregate zero samples.
    #[error("no data: {0}")]
    NoData(String),
    /// A repeated search exhausted its budget.
    #[error("not found: {0}")]
    NotFound(String),
    /// Broken internal invariant.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, QsimError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(QsimError::Domain(msg.into()))
}

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(QsimError::Validation(msg.into()))
}
