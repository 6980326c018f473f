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

//! Process-wide simulator configuration.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{QsimError, Result};

/// Default qubit cap: 2^24 amplitudes, 256 MiB of state.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Environment variable that overrides the qubit cap.
pub const MAX_QUBITS_ENV: &str = "QSIM_MAX_QUBITS";

static MAX_QUBITS: AtomicUsize = AtomicUsize::new(0);

/// Current qubit cap. Read from `QSIM_MAX_QUBITS` on first use.
pub fn max_qubits() -> usize {
    let cur = MAX_QUBITS.load(Ordering::Relaxed);
    if cur != 0 {
        return cur;
    }
    let cap = std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| (1..=40).contains(&v))
        .unwrap_or(DEFAULT_MAX_QUBITS);
    MAX_QUBITS.store(cap, Ordering::Relaxed);
    cap
}

/// Override the qubit cap for the rest of the process.
pub fn set_max_qubits(cap: usize) -> Result<()> {
    if !(1..=40).contains(&cap) {
        return Err(QsimError::Domain(format!("qubit cap {cap} outside 1..=40")));
    }
    MAX_QUBITS.store(cap, Ordering::Relaxed);
    Ok(())
}

pub(crate) fn check_qubits(requested: usize) -> Result<()> {
    let cap = max_qubits();
    if requested > cap {
        Err(QsimError::Resource { requested, cap })
    } else {
        Ok(())
    }
}
