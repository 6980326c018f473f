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

//! One function per experiment, each turning a validated configuration
//! into result rows and `--assert` checks.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use qsim_core::algorithms::{
    apply_qft, inverse_qft, mod_pow, order_find, phase_distance, qft, GroverSearch, PhaseEstimator, PhasePlan,
    QuantumCounter,
};
use qsim_core::entangle::{
    anticorrelation_experiment, bell_state, chsh_experiment, chsh_quantum_value, classical_chsh_values, singlet,
    teleport, ChshSetting, SpinAxis, PAIR_LABELS,
};
use qsim_core::gates::BooleanOracle;
use qsim_core::hamsim::{
    accumulated_errors, exact_evolve, grover_hamiltonian_uniform, per_step_errors, reference_model, trotter_error,
    trotter_evolve, GroverHamiltonian, HamiltonianTerms, TrotterPlan,
};
use qsim_core::linalg::{paulis, CMatrix};
use qsim_core::qec::logical_error_rate;
use qsim_core::rng::StreamKey;
use qsim_core::statharness::{
    binomial_sigma, chi_square_critical, chi_square_uniform, mixture_trials, qmc_estimate_fixed, quantum_rng,
    repetition_success_probability, simulate_repetition, trimmed_success_bound, Answer, GrossErrorModel,
};
use qsim_core::{Exec, Observable, QuantumState, StateVector};

use crate::config::{Experiment, ExperimentConfig};
use crate::row::{Check, Report, ResultRow, Table};
use crate::RunError;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    params: Map<String, Value>,
    report: Report,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Ctx {
            cfg,
            params: cfg.params(),
            report: Report::default(),
        }
    }

    fn row(&mut self, metric: &str, value: f64, stderr: Option<f64>, reference: Option<f64>) {
        self.row_with(metric, value, stderr, reference, &[]);
    }

    fn row_with(&mut self, metric: &str, value: f64, stderr: Option<f64>, reference: Option<f64>, extra: &[(&str, Value)]) {
        let mut params = self.params.clone();
        for (k, v) in extra {
            params.insert(k.to_string(), v.clone());
        }
        self.report.rows.push(ResultRow {
            experiment: self.cfg.experiment.name().to_string(),
            seed: self.cfg.seed,
            params,
            metric: metric.to_string(),
            value,
            stderr,
            reference,
        });
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.report.checks.push(Check::new(name, passed, detail));
    }

    fn exec(&self) -> Exec {
        Exec::default()
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut ctx = Ctx::new(cfg);
    match cfg.experiment {
        Experiment::Bell => bell(&mut ctx)?,
        Experiment::Chsh => chsh(&mut ctx)?,
        Experiment::Teleport => teleportation(&mut ctx)?,
        Experiment::Qft => fourier(&mut ctx)?,
        Experiment::PhaseEst => phase_est(&mut ctx)?,
        Experiment::Grover => grover(&mut ctx)?,
        Experiment::Count => count(&mut ctx)?,
        Experiment::OrderFind => order(&mut ctx)?,
        Experiment::Trotter => trotter(&mut ctx)?,
        Experiment::GroverHam => grover_ham(&mut ctx)?,
        Experiment::QecSweep => qec_sweep(&mut ctx)?,
        Experiment::Qrng => qrng(&mut ctx)?,
        Experiment::Qmc => qmc(&mut ctx)?,
        Experiment::StatsBound => stats_bound(&mut ctx)?,
    }
    Ok(ctx.report)
}

fn read_state(path: &std::path::Path) -> Result<StateVector, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(StateVector::from_json(&text)?)
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

fn bell(ctx: &mut Ctx) -> Result<(), RunError> {
    let shots = ctx.cfg.shots;
    let key = StreamKey::new(ctx.cfg.seed, "bell");
    for x1 in 0..2u8 {
        for x2 in 0..2u8 {
            let state = bell_state(x1, x2)?;
            let sub = key.child((x1 * 2 + x2) as u64);
            let equal = (0..shots)
                .map(|j| state.measure_qubits(&[0, 1], &mut sub.shot(j as u64)).map(|m| m.bits[0] == m.bits[1]))
                .collect::<qsim_core::Result<Vec<_>>>()?
                .into_iter()
                .filter(|&e| e)
                .count();
            let freq = equal as f64 / shots as f64;
            let reference = if x2 == 0 { 1.0 } else { 0.0 };
            ctx.row(&format!("bell_{x1}{x2}_equal_bits"), freq, None, Some(reference));
            ctx.check(&format!("bell_{x1}{x2}"), freq == reference, format!("equal-bit frequency {freq}"));
        }
    }
    let axis = SpinAxis::random(&mut key.child(99).shot(0));
    let pairs = anticorrelation_experiment(axis, shots, ctx.cfg.seed)?;
    let anti = pairs.iter().filter(|p| p.alice == -p.bob).count() as f64 / shots as f64;
    ctx.row("singlet_anticorrelation", anti, None, Some(1.0));
    ctx.check("singlet_anticorrelation", anti == 1.0, format!("fraction {anti}"));
    Ok(())
}

fn chsh(ctx: &mut Ctx) -> Result<(), RunError> {
    let tsirelson = 2.0 * SQRT_2;
    let setting = ChshSetting::standard();
    let psi = singlet();
    let exact = chsh_quantum_value(&psi, &setting)?;
    ctx.row("chsh_exact", exact, None, Some(tsirelson));
    let est = chsh_experiment(ctx.cfg.shots, ctx.cfg.seed)?;
    ctx.row("chsh_value", est.value, Some(est.stderr), Some(tsirelson));
    for (p, name) in PAIR_LABELS.iter().enumerate() {
        let (a, b, _) = setting.pair(p);
        let e = psi.expectation(&a.tensor(b)?)?;
        let label = name.to_lowercase();
        let sigma = ((1.0 - est.correlators[p].powi(2)) / est.counts[p] as f64).sqrt();
        ctx.row(&format!("correlator_{label}"), est.correlators[p], Some(sigma), Some(e));
    }
    let classical = classical_chsh_values().iter().map(|(_, v)| v.abs()).max().unwrap_or(0);
    ctx.row("classical_max", classical as f64, None, Some(2.0));
    ctx.check(
        "chsh_value",
        (est.value - tsirelson).abs() <= 4.0 * est.stderr,
        format!("{} ± {} vs 2√2", est.value, est.stderr),
    );
    ctx.check("chsh_exact", (exact - tsirelson).abs() <= 1e-9, format!("{exact}"));
    if ctx.cfg.raw {
        let mut t = Table::new(&["shot", "setting", "alice", "bob"]);
        for s in &est.shots {
            t.push(vec![json!(s.shot), json!(s.setting), json!(s.alice), json!(s.bob)]);
        }
        ctx.report.raw = Some(t);
    }
    Ok(())
}

fn teleportation(ctx: &mut Ctx) -> Result<(), RunError> {
    let given = ctx.cfg.state.as_deref().map(read_state).transpose()?;
    let key = StreamKey::new(ctx.cfg.seed, "teleport");
    let shots = ctx.cfg.shots;
    let results = qsim_core::parallel::try_map_indexed(ctx.exec(), shots, |j| {
        let mut rng = key.shot(j as u64);
        let psi = match &given {
            Some(s) => s.clone(),
            None => StateVector::random(1, &mut rng)?,
        };
        let t = teleport(&psi, &mut rng)?;
        Ok::<_, qsim_core::QsimError>((t.bob.fidelity(&psi), t.bits))
    })?;
    let min_f = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let mean_f = results.iter().map(|r| r.0).sum::<f64>() / shots as f64;
    ctx.row("min_fidelity", min_f, None, Some(1.0));
    ctx.row("mean_fidelity", mean_f, None, Some(1.0));
    ctx.check("min_fidelity", min_f >= 1.0 - 1e-10, format!("{min_f}"));
    let sigma = binomial_sigma(0.5, shots);
    for bit in 0..2 {
        let ones = results.iter().filter(|r| r.1[bit] == 1).count() as f64 / shots as f64;
        ctx.row(&format!("m{bit}_ones_frequency"), ones, Some(sigma), Some(0.5));
        ctx.check(
            &format!("m{bit}_uniform"),
            (ones - 0.5).abs() <= 4.0 * sigma,
            format!("{ones} vs 1/2 ± {sigma}"),
        );
    }
    Ok(())
}

fn dft(n: usize) -> CMatrix {
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    let mut m = CMatrix::zeros(dim);
    for j in 0..dim {
        for k in 0..dim {
            let angle = std::f64::consts::TAU * ((j * k) % dim) as f64 / dim as f64;
            m.set(k, j, Complex64::from_polar(scale, angle));
        }
    }
    m
}

fn fourier(ctx: &mut Ctx) -> Result<(), RunError> {
    let input = match &ctx.cfg.state {
        Some(p) => read_state(p)?,
        None => StateVector::random(ctx.cfg.bits, &mut StreamKey::new(ctx.cfg.seed, "qft").shot(0))?,
    };
    let n = input.qubits();
    let circuit = qft(n)?;
    ctx.row("gate_count", circuit.len() as f64, None, None);
    if n <= qsim_core::gates::DENSE_CIRCUIT_MAX_QUBITS {
        let diff = circuit.dense_matrix()?.max_abs_diff(&dft(n));
        ctx.row("dft_max_abs_diff", diff, None, Some(0.0));
        ctx.check("dft_agreement", diff <= 1e-9, format!("{diff:e}"));
    }
    let out = apply_qft(&input)?;
    let back = inverse_qft(n)?.run(&out)?;
    let f = back.fidelity(&input);
    ctx.row("roundtrip_fidelity", f, None, Some(1.0));
    ctx.check("roundtrip", f >= 1.0 - 1e-9, format!("{f}"));
    if let Some(p) = &ctx.cfg.dump_state {
        write_file(p, &out.to_json())?;
    }
    if let Some(p) = &ctx.cfg.dump_circuit {
        write_file(p, &circuit.to_json())?;
    }
    Ok(())
}

fn phase_gate(phi: f64) -> CMatrix {
    CMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, std::f64::consts::TAU * phi)])
}

fn phase_est(ctx: &mut Ctx) -> Result<(), RunError> {
    let (phi, zeta, eps) = (ctx.cfg.phi.rem_euclid(1.0), ctx.cfg.zeta, ctx.cfg.epsilon);
    let plan = PhasePlan::new(zeta, eps)?;
    let est = PhaseEstimator::prepare(&phase_gate(phi), &StateVector::basis_state(1, 1)?, plan.b)?;
    let key = StreamKey::new(ctx.cfg.seed, "phase-est");
    let shots = ctx.cfg.shots;
    let samples = qsim_core::parallel::try_map_indexed(ctx.exec(), shots, |j| est.sample(&mut key.shot(j as u64)))?;
    let hits = samples.iter().filter(|s| phase_distance(s.phase, phi) <= zeta).count();
    let freq = hits as f64 / shots as f64;
    let sigma = binomial_sigma(1.0 - eps, shots);
    ctx.row("register_qubits", plan.b as f64, None, None);
    ctx.row("coverage", freq, Some(sigma), Some(1.0 - eps));
    ctx.row("exact_coverage", est.coverage(phi, zeta), None, Some(1.0 - eps));
    ctx.row("success_bound", plan.success_bound(), None, None);
    ctx.check(
        "coverage",
        freq >= (1.0 - eps) - 3.0 * sigma,
        format!("{freq} vs {} − 3σ", 1.0 - eps),
    );
    Ok(())
}

fn spaced_marks(n: usize, m: usize) -> Vec<usize> {
    (0..m).map(|k| k * n / m.max(1) + (n / m.max(1)) / 2).collect()
}

fn grover(ctx: &mut Ctx) -> Result<(), RunError> {
    let (n, m) = (ctx.cfg.n, ctx.cfg.m);
    let bits = n.trailing_zeros() as usize;
    let f = BooleanOracle::marking(bits, &spaced_marks(n, m))?;
    let search = GroverSearch::new(&f, m)?;
    let key = StreamKey::new(ctx.cfg.seed, "grover");
    let shots = ctx.cfg.shots;
    let outcomes = qsim_core::parallel::try_map_indexed(ctx.exec(), shots, |j| search.sample(&mut key.shot(j as u64)))?;
    let rate = outcomes.iter().filter(|o| o.is_solution).count() as f64 / shots as f64;
    let exact = search.success_probability();
    let sigma = binomial_sigma(exact, shots);
    ctx.row("iterations", search.plan.iterations as f64, None, None);
    ctx.row("success_rate", rate, Some(sigma), Some(exact));
    ctx.row("exact_success_probability", exact, None, None);
    ctx.row("success_lower_bound", 1.0 - m as f64 / n as f64, None, None);
    ctx.check("success_rate", rate >= exact - 3.0 * sigma, format!("{rate} vs {exact}"));
    ctx.check("success_bound", exact >= 1.0 - m as f64 / n as f64 - 1e-12, format!("{exact}"));
    Ok(())
}

fn count(ctx: &mut Ctx) -> Result<(), RunError> {
    let (n, m) = (ctx.cfg.n, ctx.cfg.m);
    let bits = n.trailing_zeros() as usize;
    let f = BooleanOracle::marking(bits, &spaced_marks(n, m))?;
    let plan = PhasePlan::new(ctx.cfg.zeta, ctx.cfg.epsilon)?;
    let counter = QuantumCounter::new(&f, &plan)?;
    let key = StreamKey::new(ctx.cfg.seed, "count");
    let shots = ctx.cfg.shots;
    let ests = qsim_core::parallel::try_map_indexed(ctx.exec(), shots, |j| counter.sample(&mut key.shot(j as u64)))?;
    let mut tally = vec![0usize; n + 1];
    for e in &ests {
        tally[e.m_hat] += 1;
    }
    let mode = (0..=n).max_by_key(|&k| (tally[k], std::cmp::Reverse(k))).unwrap_or(0);
    let freq = tally[m] as f64 / shots as f64;
    let exact = counter.probability_of(m);
    ctx.row("register_qubits", plan.b as f64, None, None);
    ctx.row("count_mode", mode as f64, None, Some(m as f64));
    ctx.row(
        "correct_frequency",
        freq,
        Some(binomial_sigma(exact, shots)),
        Some(exact),
    );
    ctx.row("mean_count", ests.iter().map(|e| e.m_hat as f64).sum::<f64>() / shots as f64, None, Some(m as f64));
    ctx.check("count_mode", mode == m, format!("mode {mode}, expected {m}"));
    Ok(())
}

fn order(ctx: &mut Ctx) -> Result<(), RunError> {
    let (x, modulus) = (ctx.cfg.x, ctx.cfg.modulus);
    let report = order_find(x, modulus, ctx.cfg.seed, ctx.cfg.shots)?;
    let r = report.value.denominator.unwrap_or(0);
    let truth = (1..=modulus).find(|&k| mod_pow(x, k, modulus) == 1).unwrap_or(0);
    ctx.row("order", r as f64, None, Some(truth as f64));
    ctx.row("runs", report.runs as f64, None, None);
    ctx.check("order", r == truth, format!("found {r}, brute force {truth}"));
    Ok(())
}

fn hamiltonian(ctx: &Ctx) -> Result<HamiltonianTerms, RunError> {
    match &ctx.cfg.hamiltonian {
        Some(p) => Ok(HamiltonianTerms::read(p)?),
        None => Ok(reference_model()),
    }
}

fn trotter(ctx: &mut Ctx) -> Result<(), RunError> {
    let h = hamiltonian(ctx)?;
    let psi0 = StateVector::basis_state(h.qubits(), 0)?;
    let deltas = ctx.cfg.delta.clone();
    let plan = TrotterPlan::new(ctx.cfg.t_final, ctx.cfg.steps)?;
    ctx.row("terminal_error", trotter_error(&h, &plan, &psi0)?, None, None);
    let commuting = h.terms_commute(1e-12)?;
    ctx.row("terms_commute", commuting as u8 as f64, None, None);
    if deltas.len() >= 2 && !commuting {
        let (errs, slope) = per_step_errors(&h, &deltas, &psi0)?;
        for (d, e) in deltas.iter().zip(&errs) {
            ctx.row_with("per_step_error", *e, None, None, &[("delta_point", json!(d))]);
        }
        ctx.row("per_step_slope", slope, None, Some(2.0));
        ctx.check("per_step_slope", (1.8..=2.2).contains(&slope), format!("slope {slope}"));
        let (errs, acc) = accumulated_errors(&h, ctx.cfg.t_final, &deltas, &psi0)?;
        for (d, e) in deltas.iter().zip(&errs) {
            ctx.row_with("accumulated_error", *e, None, None, &[("delta_point", json!(d))]);
        }
        ctx.row("accumulated_slope", acc, None, None);
    }
    Ok(())
}

fn grover_ham(ctx: &mut Ctx) -> Result<(), RunError> {
    let (bits, x) = (ctx.cfg.bits, ctx.cfg.x as usize);
    let g = grover_hamiltonian_uniform(bits, x)?;
    ctx.row("alpha", g.alpha, None, Some((1.0 / (1u64 << bits) as f64).sqrt()));
    ctx.row("t_measure", g.t_measure, None, None);
    let p = g.reduced_success(g.t_measure)?;
    ctx.row("success_probability", p, None, Some(1.0));
    ctx.check("success_probability", p >= 1.0 - 1e-9, format!("{p}"));
    if bits <= qsim_core::hamsim::EXACT_MAX_QUBITS {
        let psi = StateVector::uniform(bits)?;
        let h = GroverHamiltonian::full_matrix(&psi, x)?;
        let out = qsim_core::hamsim::evolve_dense(&h, g.t_measure, &psi)?;
        let pf = out.amp(x).norm_sqr();
        ctx.row("full_space_success_probability", pf, None, Some(1.0));
        ctx.check("full_space_success", pf >= 1.0 - 1e-9, format!("{pf}"));
    }
    Ok(())
}

pub const QEC_CSV_COLUMNS: [&str; 6] = ["p", "shots", "failures", "rate", "predicted", "stderr"];

fn qec_sweep(ctx: &mut Ctx) -> Result<(), RunError> {
    let mut table = Table::new(&QEC_CSV_COLUMNS);
    for &p in &ctx.cfg.p.clone() {
        let r = logical_error_rate(p, ctx.cfg.shots, ctx.cfg.seed, ctx.exec())?;
        ctx.row_with("logical_error_rate", r.rate, Some(r.stderr), Some(r.predicted), &[("p", json!(p))]);
        table.push(vec![json!(p), json!(r.shots), json!(r.failures), json!(r.rate), json!(r.predicted), json!(r.stderr)]);
        ctx.check(
            &format!("rate_p{p}"),
            r.z_score() <= 3.0,
            format!("{} vs {} ({:.2}σ)", r.rate, r.predicted, r.z_score()),
        );
    }
    ctx.report.csv_table = Some(table);
    Ok(())
}

fn qrng(ctx: &mut Ctx) -> Result<(), RunError> {
    let bits = ctx.cfg.bits;
    if bits > 20 {
        return Err(RunError::Invalid(format!("--bits = {bits} too wide for a uniformity test")));
    }
    let values = quantum_rng(bits, ctx.cfg.shots, ctx.cfg.seed, ctx.exec())?;
    let cells = 1usize << bits;
    let stat = chi_square_uniform(&values, cells)?;
    let critical = chi_square_critical(cells - 1, 0.999)?;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / values.len() as f64;
    ctx.row("chi_square", stat, None, Some(critical));
    ctx.row("mean", mean, None, Some((cells - 1) as f64 / 2.0));
    ctx.check("chi_square", stat < critical, format!("{stat} vs {critical}"));
    Ok(())
}

fn qmc(ctx: &mut Ctx) -> Result<(), RunError> {
    let h = hamiltonian(ctx)?;
    let b = h.qubits();
    let psi0 = StateVector::basis_state(b, 0)?;
    let ideal = exact_evolve(&h, ctx.cfg.t_final, &psi0)?;
    let plan = TrotterPlan::new(ctx.cfg.t_final, ctx.cfg.steps)?;
    let prepared = trotter_evolve(&h, &plan, &psi0)?.pop().expect("non-empty trajectory");
    let z_all = (1..b).fold(paulis::z(), |acc, _| acc.kron(&paulis::z()));
    let obs = Observable::new(z_all)?;
    let r = qmc_estimate_fixed(&obs, &prepared, &ideal, ctx.cfg.shots, ctx.cfg.seed, ctx.exec())?;
    ctx.row("theta_hat", r.theta_hat, Some(r.stderr()), Some(r.theta_tilde));
    ctx.row("theta_tilde", r.theta_tilde, None, None);
    ctx.row("theta_true", r.theta_true, None, None);
    ctx.row("bias", r.bias, None, Some(prepared.expectation(&obs)? - ideal.expectation(&obs)?));
    ctx.row("variance", r.variance, None, None);
    ctx.check(
        "theta_hat",
        (r.theta_hat - r.theta_tilde).abs() <= 4.0 * r.stderr(),
        format!("{} vs {} ± {}", r.theta_hat, r.theta_tilde, r.stderr()),
    );
    Ok(())
}

fn stats_bound(ctx: &mut Ctx) -> Result<(), RunError> {
    let (eps, alpha) = (ctx.cfg.epsilon, ctx.cfg.alpha);
    let trials = ctx.cfg.shots;
    for &n in &ctx.cfg.runs.clone() {
        let b = trimmed_success_bound(n, eps, alpha)?;
        let at = [("runs", json!(n))];
        ctx.row_with("bound_exact", b.exact, None, None, &at);
        ctx.row_with("bound_normal", b.normal, None, None, &at);
        let rep = repetition_success_probability(eps, n);
        ctx.row_with("repeat_success_exact", rep, None, None, &at);
        let sim = simulate_repetition(eps, n, trials, ctx.cfg.seed, ctx.exec())?;
        let sigma = binomial_sigma(rep, trials);
        ctx.row_with("repeat_success", sim, Some(sigma), Some(rep), &at);
        ctx.check(&format!("repeat_n{n}"), (sim - rep).abs() <= 3.0 * sigma.max(1e-12), format!("{sim} vs {rep}"));

        let zeta = 0.01;
        let model = GrossErrorModel::new(0.0, zeta, eps, Answer::Point(0.0), Answer::Point(10.0 * zeta))?;
        let runs = mixture_trials(&model, n, alpha, trials, ctx.cfg.seed, ctx.exec())?;
        let enough = runs.iter().filter(|t| t.good_runs as i64 >= b.min_good).count() as f64 / trials as f64;
        let sigma = binomial_sigma(b.exact, trials);
        ctx.row_with("mixture_good_count_frequency", enough, Some(sigma), Some(b.exact), &at);
        let within = runs.iter().filter(|t| t.within).count() as f64 / trials as f64;
        ctx.row_with("mixture_within_zeta_frequency", within, None, None, &at);
        ctx.check(
            &format!("bound_mc_n{n}"),
            (enough - b.exact).abs() <= 3.0 * sigma.max(1.0 / trials as f64),
            format!("{enough} vs {}", b.exact),
        );
    }
    Ok(())
}
