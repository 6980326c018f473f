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

//! Command-line flags and their validation into an [`ExperimentConfig`].

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::RunError;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Bell,
    Chsh,
    Teleport,
    Qft,
    PhaseEst,
    Grover,
    Count,
    OrderFind,
    Trotter,
    GroverHam,
    QecSweep,
    Qrng,
    Qmc,
    StatsBound,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Bell => "bell",
            Experiment::Chsh => "chsh",
            Experiment::Teleport => "teleport",
            Experiment::Qft => "qft",
            Experiment::PhaseEst => "phase-est",
            Experiment::Grover => "grover",
            Experiment::Count => "count",
            Experiment::OrderFind => "order-find",
            Experiment::Trotter => "trotter",
            Experiment::GroverHam => "grover-ham",
            Experiment::QecSweep => "qec-sweep",
            Experiment::Qrng => "qrng",
            Experiment::Qmc => "qmc",
            Experiment::StatsBound => "stats-bound",
        }
    }

    fn default_shots(self) -> usize {
        match self {
            Experiment::Chsh | Experiment::QecSweep | Experiment::Qrng => 100_000,
            Experiment::Qmc | Experiment::StatsBound => 10_000,
            Experiment::PhaseEst => 2000,
            Experiment::OrderFind => 25,
            Experiment::GroverHam | Experiment::Qft | Experiment::Trotter => 1,
            _ => 1000,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    #[value(name = "json-lines", alias = "json", alias = "jsonl")]
    JsonLines,
    Csv,
}

/// Raw flags. Experiment-specific flags are optional; unset ones take the
/// per-experiment defaults in [`ExperimentConfig::from_cli`].
#[derive(Debug, Clone, Parser)]
#[command(name = "qsim", version, about = "State-vector quantum simulation experiments")]
pub struct Cli {
    /// Experiment to run.
    #[arg(long, value_enum, required_unless_present = "acceptance")]
    pub experiment: Option<Experiment>,
    /// Master seed; every shot derives its own stream from it.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Shots, runs or trials, depending on the experiment.
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::JsonLines)]
    pub format: Format,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Exit with status 3 when a result misses its reference.
    #[arg(long)]
    pub assert: bool,
    /// Run the acceptance suite instead of a single experiment.
    #[arg(long, conflicts_with = "experiment")]
    pub acceptance: bool,
    /// Test mode: replace the named criterion's tolerance by an impossible one.
    #[arg(long, value_name = "CRITERION")]
    pub corrupt_tolerance: Option<String>,

    /// Phase-estimation accuracy ζ.
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Failure probability ε (phase estimation, counting, statistics).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Trim fraction α.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Search-space size N (a power of two).
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Number of marked items M.
    #[arg(long = "m")]
    pub m: Option<usize>,
    /// Flip probabilities for the QEC sweep.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    /// Trotter step lengths.
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
    /// Trotter step count.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Evolution time.
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Order-finding base, or the solution index for grover-ham.
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Register width b (qft, qrng, grover-ham).
    #[arg(long)]
    pub bits: Option<usize>,
    /// Eigenphase for phase-est.
    #[arg(long)]
    pub phi: Option<f64>,
    /// Run counts for stats-bound.
    #[arg(long = "runs", value_delimiter = ',')]
    pub runs: Option<Vec<usize>>,
    /// Hamiltonian JSON for trotter and qmc.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Amplitude JSON input state (teleport: one qubit; qft: any width).
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Write the final state of qft as amplitude JSON.
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
    /// Write the QFT circuit as circuit JSON.
    #[arg(long)]
    pub dump_circuit: Option<PathBuf>,
    /// chsh: emit one {shot, setting, alice, bob} row per shot.
    #[arg(long)]
    pub raw: bool,
}

/// Parameters after defaults and precondition checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub shots: usize,
    pub zeta: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
    pub p: Vec<f64>,
    pub delta: Vec<f64>,
    pub steps: usize,
    pub t_final: f64,
    pub x: u64,
    pub modulus: u64,
    pub bits: usize,
    pub phi: f64,
    pub runs: Vec<usize>,
    pub hamiltonian: Option<PathBuf>,
    pub state: Option<PathBuf>,
    pub dump_state: Option<PathBuf>,
    pub dump_circuit: Option<PathBuf>,
    pub raw: bool,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Invalid(msg.into()))
}

fn probability(name: &str, v: f64, lo_open: bool, hi_open: bool) -> Result<f64, RunError> {
    let lo_ok = if lo_open { v > 0.0 } else { v >= 0.0 };
    let hi_ok = if hi_open { v < 1.0 } else { v <= 1.0 };
    if !(v.is_finite() && lo_ok && hi_ok) {
        let (l, h) = (if lo_open { "(" } else { "[" }, if hi_open { ")" } else { "]" });
        return invalid(format!("{name} = {v} must lie in {l}0, 1{h}"));
    }
    Ok(v)
}

impl ExperimentConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, RunError> {
        let experiment = match cli.experiment {
            Some(e) => e,
            None => return invalid("--experiment is required"),
        };
        let grover_like = matches!(experiment, Experiment::Grover | Experiment::Count);
        let (default_n, default_m) = match experiment {
            Experiment::Count => (16, 4),
            _ => (4, 1),
        };
        let cfg = ExperimentConfig {
            experiment,
            seed: cli.seed,
            shots: cli.shots.unwrap_or(experiment.default_shots()),
            zeta: cli.zeta.unwrap_or(match experiment {
                Experiment::Count => 2f64.powi(-7),
                _ => 0.0625,
            }),
            epsilon: cli.epsilon.unwrap_or(match experiment {
                Experiment::StatsBound => 0.3,
                _ => 0.1,
            }),
            alpha: cli.alpha.unwrap_or(0.2),
            n: cli.n.unwrap_or(default_n),
            m: cli.m.unwrap_or(default_m),
            p: cli.p.clone().unwrap_or_else(|| vec![0.01, 0.05, 0.1, 0.2]),
            delta: cli.delta.clone().unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]),
            steps: cli.steps.unwrap_or(1),
            t_final: cli.t_final.unwrap_or(1.0),
            x: cli.x.unwrap_or(match experiment {
                Experiment::GroverHam => 3,
                _ => 2,
            }),
            modulus: cli.modulus.unwrap_or(5),
            bits: cli.bits.unwrap_or(match experiment {
                Experiment::GroverHam => 2,
                _ => 4,
            }),
            phi: cli.phi.unwrap_or(1.0 / 3.0),
            runs: cli.runs.clone().unwrap_or_else(|| vec![5, 20]),
            hamiltonian: cli.hamiltonian.clone(),
            state: cli.state.clone(),
            dump_state: cli.dump_state.clone(),
            dump_circuit: cli.dump_circuit.clone(),
            raw: cli.raw,
        };
        cfg.validate(grover_like)?;
        Ok(cfg)
    }

    fn validate(&self, grover_like: bool) -> Result<(), RunError> {
        if self.shots == 0 {
            return invalid("--shots must be at least 1");
        }
        probability("--epsilon", self.epsilon, true, true)?;
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return invalid(format!("--zeta = {} must lie in (0, 1)", self.zeta));
        }
        if !(0.0..0.5).contains(&self.alpha) {
            return invalid(format!("--alpha = {} must lie in [0, 1/2)", self.alpha));
        }
        for &p in &self.p {
            probability("--p", p, false, false)?;
        }
        for &d in &self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return invalid(format!("--delta = {d} must be positive"));
            }
        }
        if self.steps == 0 {
            return invalid("--steps must be at least 1");
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return invalid(format!("--t-final = {} must be non-negative", self.t_final));
        }
        if !self.phi.is_finite() {
            return invalid("--phi must be finite");
        }
        if self.bits == 0 {
            return invalid("--bits must be at least 1");
        }
        if self.runs.contains(&0) {
            return invalid("--runs entries must be at least 1");
        }
        if grover_like {
            if !self.n.is_power_of_two() || self.n < 2 {
                return invalid(format!("--n = {} must be a power of two ≥ 2", self.n));
            }
            if self.experiment == Experiment::Grover && (self.m == 0 || 2 * self.m > self.n) {
                return invalid(format!("precondition 1 ≤ M ≤ N/2 violated: M = {}, N = {}", self.m, self.n));
            }
            if self.m > self.n {
                return invalid(format!("--m = {} exceeds N = {}", self.m, self.n));
            }
        }
        if self.experiment == Experiment::StatsBound && self.alpha <= self.epsilon / 2.0 {
            return invalid(format!(
                "precondition α > ε/2 violated: α = {}, ε = {}",
                self.alpha, self.epsilon
            ));
        }
        Ok(())
    }

    /// The parameters an experiment actually reads, for result rows.
    pub fn params(&self) -> serde_json::Map<String, serde_json::Value> {
        use serde_json::json;
        let mut m = serde_json::Map::new();
        let mut put = |k: &str, v: serde_json::Value| {
            m.insert(k.to_string(), v);
        };
        put("shots", json!(self.shots));
        match self.experiment {
            Experiment::Bell | Experiment::Chsh | Experiment::Teleport => {}
            Experiment::Qft => put("bits", json!(self.bits)),
            Experiment::PhaseEst => {
                put("phi", json!(self.phi));
                put("zeta", json!(self.zeta));
                put("epsilon", json!(self.epsilon));
            }
            Experiment::Grover => {
                put("n", json!(self.n));
                put("m", json!(self.m));
            }
            Experiment::Count => {
                put("n", json!(self.n));
                put("m", json!(self.m));
                put("zeta", json!(self.zeta));
                put("epsilon", json!(self.epsilon));
            }
            Experiment::OrderFind => {
                put("x", json!(self.x));
                put("modulus", json!(self.modulus));
            }
            Experiment::Trotter => {
                put("delta", json!(self.delta));
                put("steps", json!(self.steps));
                put("t_final", json!(self.t_final));
            }
            Experiment::GroverHam => {
                put("bits", json!(self.bits));
                put("x", json!(self.x));
            }
            Experiment::QecSweep => {}
            Experiment::Qrng => put("bits", json!(self.bits)),
            Experiment::Qmc => {
                put("steps", json!(self.steps));
                put("t_final", json!(self.t_final));
            }
            Experiment::StatsBound => {
                put("epsilon", json!(self.epsilon));
                put("alpha", json!(self.alpha));
                put("runs", json!(self.runs));
            }
        }
        if let Some(h) = &self.hamiltonian {
            put("hamiltonian", json!(h.display().to_string()));
        }
        m
    }
}
