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

//! Command-line experiment harness for `qsim-core`.
//!
//! Each experiment emits result rows (JSON lines or CSV) and a list of
//! checks against analytic references. `--acceptance` runs the full
//! acceptance suite instead.

pub mod acceptance;
pub mod config;
pub mod experiments;
pub mod row;

use std::io::Write;

use qsim_core::QsimError;

pub use config::{Cli, Experiment, ExperimentConfig, Format};
pub use row::{Report, ResultRow};

/// Exit status for bad input or a violated precondition.
pub const EXIT_INVALID: i32 = 2;
/// Exit status when `--assert` checks or acceptance criteria fail.
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] QsimError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("acceptance criteria failed: {}", .0.join(", "))]
    AcceptanceFailed(Vec<String>),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Internal(e.to_string())
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => EXIT_INVALID,
            RunError::Core(
                QsimError::Domain(_) | QsimError::Validation(_) | QsimError::Precondition(_) | QsimError::Resource { .. },
            ) => EXIT_INVALID,
            RunError::AcceptanceFailed(_) => EXIT_CHECK_FAILED,
            _ => 1,
        }
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), RunError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(RunError::Invalid("--threads must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Run the acceptance suite, writing one JSON line per criterion to `out`.
pub fn run_acceptance<W: Write>(corrupt: Option<&str>, out: &mut W) -> Result<(), RunError> {
    let tol = match corrupt {
        None => acceptance::Tolerances::default(),
        Some(id) => acceptance::Tolerances::corrupted(id)
            .ok_or_else(|| RunError::Invalid(format!("unknown acceptance criterion {id:?}")))?,
    };
    let mut failed = Vec::new();
    for c in acceptance::criteria() {
        let r = c.evaluate(&tol);
        writeln!(out, "{}", r.json())?;
        eprintln!("{}", r.line());
        if !r.passed {
            failed.push(r.criterion.to_string());
        }
    }
    out.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(RunError::AcceptanceFailed(failed))
    }
}

fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<i32, RunError> {
    configure_threads(cli.threads)?;
    eprintln!("seed = {}", cli.seed);
    if cli.corrupt_tolerance.is_some() && !cli.acceptance {
        return Err(RunError::Invalid("--corrupt-tolerance only applies with --acceptance".into()));
    }
    if cli.acceptance {
        run_acceptance(cli.corrupt_tolerance.as_deref(), out)?;
        return Ok(0);
    }
    let cfg = ExperimentConfig::from_cli(cli)?;
    let report = experiments::run_experiment(&cfg)?;
    report.write(cli.format, out)?;
    out.flush()?;
    let failed = report.failed_checks();
    if cli.assert && !failed.is_empty() {
        for c in failed {
            eprintln!("check failed: {} ({})", c.name, c.detail);
        }
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(0)
}

/// Run a parsed command line and return the process exit status.
pub fn run_cli<W: Write>(cli: &Cli, out: &mut W) -> i32 {
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(RunError::Invalid("x".into()).exit_code(), EXIT_INVALID);
        assert_eq!(RunError::from(QsimError::Precondition("x".into())).exit_code(), EXIT_INVALID);
        assert_eq!(RunError::from(QsimError::Resource { requested: 30, cap: 24 }).exit_code(), EXIT_INVALID);
        assert_eq!(RunError::from(QsimError::Numerical("x".into())).exit_code(), 1);
        assert_eq!(RunError::AcceptanceFailed(vec!["8b".into()]).exit_code(), EXIT_CHECK_FAILED);
        assert_eq!(RunError::Io("x".into()).exit_code(), 1);
    }

    #[test]
    fn unknown_corruption_target() {
        let err = run_acceptance(Some("nope"), &mut Vec::new()).unwrap_err();
        assert!(matches!(err, RunError::Invalid(_)));
    }
}
