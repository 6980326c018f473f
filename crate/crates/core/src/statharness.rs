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

//! Repetition, trimmed-mean estimation under the gross-error model, Monte
//! Carlo estimation of expectation values, and random-number extraction.

use std::fmt;

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::factorial::ln_binomial;

use crate::error::{domain, QsimError, Result};
use crate::gates::hadamard_layer;
use crate::parallel::{try_map_indexed, Exec};
use crate::qstate::{Observable, QuantumState, StateVector};
use crate::rng::{Cdf, StreamKey};

/// Floor of `x`, nudged so that `50 * 0.25` lands on 12 and not 11.
fn floor_tol(x: f64) -> i64 {
    (x + 1e-9).floor() as i64
}

/// Sort, drop `⌊nα⌋` samples from each tail, average the rest.
pub fn trimmed_mean(samples: &[f64], alpha: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&alpha) {
        return domain(format!("trim fraction α = {alpha} must lie in [0, 1/2)"));
    }
    if samples.is_empty() {
        return domain("trimmed mean of an empty sample");
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return domain("trimmed mean of non-finite samples");
    }
    let n = samples.len();
    let cut = floor_tol(n as f64 * alpha) as usize;
    if 2 * cut >= n {
        return domain(format!("trimming {cut} from each tail of {n} leaves nothing"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let kept = &sorted[cut..n - cut];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

/// Exact binomial tail and its normal approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessBound {
    pub n: usize,
    pub epsilon: f64,
    pub alpha: f64,
    /// Smallest number of good runs counted by the tail, `⌊n(1-2α)⌋ - 1`.
    pub min_good: i64,
    pub exact: f64,
    pub normal: f64,
}

/// `P(Bin(n, 1-ε) ≥ k)`, summed in log space.
pub fn binomial_upper_tail(n: usize, q: f64, k: i64) -> f64 {
    if k <= 0 {
        return 1.0;
    }
    if k as usize > n {
        return 0.0;
    }
    if q >= 1.0 {
        return 1.0;
    }
    if q <= 0.0 {
        return 0.0;
    }
    let (lq, lp) = (q.ln(), (1.0 - q).ln());
    let term = |j: u64| (ln_binomial(n as u64, j) + j as f64 * lq + (n as u64 - j) as f64 * lp).exp();
    // sum whichever side is the smaller tail to keep precision near 1
    if (k as f64) > n as f64 * q {
        (k as u64..=n as u64).map(term).sum::<f64>().min(1.0)
    } else {
        (1.0 - (0..k as u64).map(term).sum::<f64>()).max(0.0)
    }
}

/// Lower bound on the probability that the α-trimmed mean of `n` runs lands
/// within ζ of the truth when each run is wrong with probability ε.
pub fn trimmed_success_bound(n: usize, epsilon: f64, alpha: f64) -> Result<SuccessBound> {
    if n == 0 {
        return domain("bound over zero runs");
    }
    if !(0.0..1.0).contains(&epsilon) {
        return domain(format!("ε = {epsilon} must lie in [0, 1)"));
    }
    if !(0.0..0.5).contains(&alpha) {
        return domain(format!("α = {alpha} must lie in [0, 1/2)"));
    }
    if alpha <= epsilon / 2.0 {
        return Err(QsimError::Precondition(format!(
            "trim fraction α = {alpha} must exceed ε/2 = {}",
            epsilon / 2.0
        )));
    }
    let min_good = floor_tol(n as f64 * (1.0 - 2.0 * alpha)) - 1;
    let exact = binomial_upper_tail(n, 1.0 - epsilon, min_good);
    let normal = if epsilon == 0.0 {
        1.0
    } else {
        let z = (n as f64).sqrt() * (2.0 * alpha - epsilon) / (epsilon * (1.0 - epsilon)).sqrt();
        Normal::standard().cdf(z)
    };
    Ok(SuccessBound {
        n,
        epsilon,
        alpha,
        min_good,
        exact,
        normal,
    })
}

/// Outcome of a verified repetition loop.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionReport<T> {
    /// Runs consumed, including the accepted one.
    pub runs: usize,
    pub value: T,
    pub per_run: Vec<T>,
}

/// Every candidate from a loop that never verified.
#[derive(Debug, Clone, PartialEq)]
pub struct Exhausted<T> {
    pub budget: usize,
    pub candidates: Vec<T>,
}

impl<T: fmt::Debug> fmt::Display for Exhausted<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no candidate verified in {} runs: {:?}", self.budget, self.candidates)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepeatError<T> {
    Run(QsimError),
    Exhausted(Exhausted<T>),
}

impl<T: fmt::Debug> From<RepeatError<T>> for QsimError {
    fn from(e: RepeatError<T>) -> Self {
        match e {
            RepeatError::Run(e) => e,
            RepeatError::Exhausted(x) => QsimError::NotFound(x.to_string()),
        }
    }
}

/// Call `run(0)`, `run(1)`, ... until `verify` accepts or `max_runs` calls
/// have been made.
pub fn repeat_verified<T, F, V>(mut run: F, verify: V, max_runs: usize) -> std::result::Result<RepetitionReport<T>, RepeatError<T>>
where
    T: Clone,
    F: FnMut(usize) -> Result<T>,
    V: Fn(&T) -> bool,
{
    if max_runs == 0 {
        return Err(RepeatError::Run(QsimError::Domain("repetition budget of zero runs".into())));
    }
    let mut per_run = Vec::new();
    for i in 0..max_runs {
        let candidate = run(i).map_err(RepeatError::Run)?;
        let ok = verify(&candidate);
        per_run.push(candidate);
        if ok {
            return Ok(RepetitionReport {
                runs: i + 1,
                value: per_run[i].clone(),
                per_run,
            });
        }
    }
    Err(RepeatError::Exhausted(Exhausted {
        budget: max_runs,
        candidates: per_run,
    }))
}

/// `1 - εⁿ`
pub fn repetition_success_probability(epsilon: f64, n: usize) -> f64 {
    1.0 - epsilon.powi(n as i32)
}

/// Empirical success frequency of [`repeat_verified`] on a procedure that
/// fails independently with probability `epsilon`.
pub fn simulate_repetition(epsilon: f64, budget: usize, trials: usize, seed: u64, exec: Exec) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return domain(format!("failure probability {epsilon} outside [0, 1]"));
    }
    if trials == 0 {
        return Err(QsimError::NoData("zero trials".into()));
    }
    let key = StreamKey::new(seed, "repetition");
    let hits = try_map_indexed(exec, trials, |t| {
        let mut rng = key.shot(t as u64);
        match repeat_verified(|_| Ok(rng.random::<f64>() >= epsilon), |&ok| ok, budget) {
            Ok(_) => Ok(1usize),
            Err(RepeatError::Exhausted(_)) => Ok(0),
            Err(RepeatError::Run(e)) => Err(e),
        }
    })?;
    Ok(hits.iter().sum::<usize>() as f64 / trials as f64)
}

/// Distribution of answers in the gross-error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Answer {
    Point(f64),
    Uniform { lo: f64, hi: f64 },
}

impl Answer {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Answer::Point(x) => x,
            Answer::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        }
    }

    /// Closest and farthest distance of the support from `x`.
    fn distance_range(&self, x: f64) -> (f64, f64) {
        match *self {
            Answer::Point(p) => ((p - x).abs(), (p - x).abs()),
            Answer::Uniform { lo, hi } => {
                let near = if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                };
                (near, (lo - x).abs().max((hi - x).abs()))
            }
        }
    }
}

/// With probability `1 - ε` a run returns a good answer within ζ of the
/// truth, otherwise a bad answer at least ζ away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrossErrorModel {
    pub truth: f64,
    pub zeta: f64,
    pub epsilon: f64,
    pub good: Answer,
    pub bad: Answer,
}

impl GrossErrorModel {
    pub fn new(truth: f64, zeta: f64, epsilon: f64, good: Answer, bad: Answer) -> Result<Self> {
        if !(zeta > 0.0) {
            return domain(format!("ζ = {zeta} must be positive"));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return domain(format!("ε = {epsilon} must lie in [0, 1)"));
        }
        let slack = zeta * 1e-12;
        if good.distance_range(truth).1 > zeta + slack {
            return domain("good answers must lie within ζ of the truth");
        }
        if bad.distance_range(truth).0 < zeta - slack {
            return domain("bad answers must lie at least ζ from the truth");
        }
        Ok(GrossErrorModel {
            truth,
            zeta,
            epsilon,
            good,
            bad,
        })
    }

    /// One run: `(value, was_good)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, bool) {
        if rng.random::<f64>() < self.epsilon {
            (self.bad.sample(rng), false)
        } else {
            (self.good.sample(rng), true)
        }
    }
}

/// One Monte Carlo trial of `n` runs from the mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureTrial {
    pub good_runs: usize,
    pub trimmed: f64,
    /// `|trimmed − truth| ≤ ζ`
    pub within: bool,
}

/// Simulate `trials` batches of `n` runs and trim each batch.
pub fn mixture_trials(
    model: &GrossErrorModel,
    n: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<MixtureTrial>> {
    let key = StreamKey::new(seed, "gross-error").child(n as u64);
    try_map_indexed(exec, trials, |t| {
        let mut rng = key.shot(t as u64);
        let mut values = Vec::with_capacity(n);
        let mut good_runs = 0;
        for _ in 0..n {
            let (v, good) = model.sample(&mut rng);
            good_runs += good as usize;
            values.push(v);
        }
        let trimmed = trimmed_mean(&values, alpha)?;
        Ok(MixtureTrial {
            good_runs,
            trimmed,
            within: (trimmed - model.truth).abs() <= model.zeta * (1.0 + 1e-12),
        })
    })
}

/// Monte Carlo estimate of `θ = tr(Xρ)` from repeated preparation and
/// measurement.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QmcResult {
    /// Mean of the recorded outcomes.
    pub theta_hat: f64,
    /// `tr(Xρ)` for the ideal state.
    pub theta_true: f64,
    /// Average of `tr(Xρ̃_j)` over the prepared states.
    pub theta_tilde: f64,
    /// `theta_tilde - theta_true`
    pub bias: f64,
    /// Sample variance of the outcomes divided by `n`.
    pub variance: f64,
    pub n: usize,
    pub samples: Vec<f64>,
}

impl QmcResult {
    pub fn stderr(&self) -> f64 {
        self.variance.sqrt()
    }
}

fn sample_variance(xs: &[f64], mean: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Prepare with `prepare(shot)` and measure `obs` once per shot. `ideal` is
/// the exact state whose expectation is the target.
pub fn qmc_estimate<P>(obs: &Observable, prepare: P, ideal: &StateVector, n: usize, seed: u64, exec: Exec) -> Result<QmcResult>
where
    P: Fn(usize) -> Result<StateVector> + Sync + Send,
{
    if n == 0 {
        return Err(QsimError::NoData("QMC estimate from zero shots".into()));
    }
    let theta_true = ideal.expectation(obs)?;
    let key = StreamKey::new(seed, "qmc");
    let eigen = obs.eigenvalues();
    let shots = try_map_indexed(exec, n, |j| {
        let state = prepare(j)?;
        let expect = state.expectation(obs)?;
        let cdf = Cdf::new(&state.outcome_probabilities(obs)?);
        let idx = cdf
            .sample(&mut key.shot(j as u64))
            .ok_or_else(|| QsimError::Internal("empty outcome distribution".into()))?;
        Ok::<_, QsimError>((eigen[idx], expect))
    })?;
    let samples: Vec<f64> = shots.iter().map(|s| s.0).collect();
    let theta_tilde = shots.iter().map(|s| s.1).sum::<f64>() / n as f64;
    finish_qmc(samples, theta_true, theta_tilde)
}

/// [`qmc_estimate`] for a preparation that yields the same state every shot;
/// the state and its outcome distribution are computed once.
pub fn qmc_estimate_fixed(
    obs: &Observable,
    prepared: &StateVector,
    ideal: &StateVector,
    n: usize,
    seed: u64,
    exec: Exec,
) -> Result<QmcResult> {
    if n == 0 {
        return Err(QsimError::NoData("QMC estimate from zero shots".into()));
    }
    let theta_true = ideal.expectation(obs)?;
    let theta_tilde = prepared.expectation(obs)?;
    let eigen = obs.eigenvalues();
    let cdf = Cdf::new(&prepared.outcome_probabilities(obs)?);
    let key = StreamKey::new(seed, "qmc");
    let samples = try_map_indexed(exec, n, |j| {
        cdf.sample(&mut key.shot(j as u64))
            .map(|i| eigen[i])
            .ok_or_else(|| QsimError::Internal("empty outcome distribution".into()))
    })?;
    finish_qmc(samples, theta_true, theta_tilde)
}

fn finish_qmc(samples: Vec<f64>, theta_true: f64, theta_tilde: f64) -> Result<QmcResult> {
    let n = samples.len();
    let theta_hat = samples.iter().sum::<f64>() / n as f64;
    let variance = sample_variance(&samples, theta_hat) / n as f64;
    Ok(QmcResult {
        theta_hat,
        theta_true,
        theta_tilde,
        bias: theta_tilde - theta_true,
        variance,
        n,
        samples,
    })
}

/// Hadamard layer on `|0…0⟩`, full measurement, one `b`-bit integer per
/// shot. A simulator only reproduces the statistics; the output is as
/// deterministic as its seed.
pub fn quantum_rng(bits: usize, shots: usize, seed: u64, exec: Exec) -> Result<Vec<u64>> {
    if bits == 0 || bits > 63 {
        return domain(format!("cannot emit {bits}-bit integers"));
    }
    let state = hadamard_layer(bits)?;
    let cdf = Cdf::new(&state.probabilities());
    let key = StreamKey::new(seed, "qrng");
    try_map_indexed(exec, shots, |j| {
        cdf.sample(&mut key.shot(j as u64))
            .map(|x| x as u64)
            .ok_or_else(|| QsimError::Internal("empty distribution".into()))
    })
}

/// Pearson statistic of `values` against the uniform law on `0..cells`.
pub fn chi_square_uniform(values: &[u64], cells: usize) -> Result<f64> {
    if values.is_empty() || cells < 2 {
        return Err(QsimError::NoData("chi-square needs data and at least two cells".into()));
    }
    let mut counts = vec![0u64; cells];
    for &v in values {
        let v = v as usize;
        if v >= cells {
            return domain(format!("value {v} outside 0..{cells}"));
        }
        counts[v] += 1;
    }
    let expected = values.len() as f64 / cells as f64;
    Ok(counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum())
}

/// Upper `level` quantile of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_critical(dof: usize, level: f64) -> Result<f64> {
    let law = ChiSquared::new(dof as f64).map_err(|e| QsimError::Domain(e.to_string()))?;
    Ok(law.inverse_cdf(level))
}

/// Standard error of a Bernoulli frequency.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
