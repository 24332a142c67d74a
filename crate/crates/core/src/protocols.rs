//! End-to-end duration-measurement protocols.
//!
//! The coherent stopwatch alternates free evolution with compression into
//! a small quantum memory; one final measurement reads out the total
//! duration. The incoherent competitor measures every interval with a
//! fresh ensemble and adds the estimates, paying the sqrt(k) cost of
//! summing independent errors.
//!
//! For gamma = 0 the blockwise evolution is exact and the whole pipeline
//! (including leaked weight replaced inside the window) is simulated
//! faithfully. For gamma > 0 a product state only stays product between
//! compressions at leading order, so the run tracks the ideal (t, p)
//! parametrically, accumulates the exact per-cycle projection error, and
//! samples the final measurement from the ideal state; the continuity of
//! the inaccuracy keeps the two error sources separable.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::clock::{ensemble_state, eigenvalue_from_decay, rotate_block_state, ClockParams};
use crate::compressor::{
    compression_error, decode, encode, EncodedState, WindowPolicy,
};
use crate::error::{invalid, Error, Result};
use crate::estimation::{
    circular_distance, inaccuracy_analytic, sample_povm_outcome, InaccuracyReport, KnownDecay,
    Mle, TimeEstimator,
};
use crate::rng::derive_rng;
use crate::sampling::{CovariantSampler, LocalPovmSampler};
use crate::spin::BlockState;

/// Durations of the k timed events, with optional memory noise in the lag
/// between consecutive events.
#[derive(Clone, Debug)]
pub struct EventSchedule {
    pub durations: Vec<f64>,
    /// One entry per inter-event gap (k-1 of them).
    pub lags: Option<Vec<LagNoise>>,
}

impl EventSchedule {
    pub fn equal(k: u32, total: f64) -> Self {
        EventSchedule { durations: vec![total / k as f64; k as usize], lags: None }
    }

    pub fn total(&self) -> f64 {
        self.durations.iter().sum()
    }

    pub fn events(&self) -> usize {
        self.durations.len()
    }

    fn validate(&self) -> Result<()> {
        if self.durations.is_empty() || self.durations.iter().any(|&d| d <= 0.0) {
            return Err(invalid("schedule needs positive event durations"));
        }
        if let Some(lags) = &self.lags {
            if lags.len() + 1 != self.durations.len() {
                return Err(invalid("need exactly one lag per inter-event gap"));
            }
        }
        Ok(())
    }
}

/// Dephasing acting on the stored memory during one lag.
#[derive(Clone, Copy, Debug)]
pub struct LagNoise {
    pub rate: f64,
    pub duration: f64,
    pub model: LagModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LagModel {
    /// Every off-diagonal element damped by exp(-rate * duration).
    UniformDamping,
    /// Level-dependent damping exp(-rate * duration * (m - m')^2 / 2).
    QuadraticPhaseDamping,
}

/// Final readout family (also used per round by the incoherent protocol).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Measurement {
    /// Canonical covariant phase measurement on the memory block.
    CovariantOnMemory,
    /// Decode back to the clock and measure every qubit independently,
    /// feeding a maximum-likelihood estimate.
    LocalOnDecoded,
}

#[derive(Clone, Copy, Debug)]
pub struct StopwatchConfig {
    pub n: u32,
    pub window_policy: WindowPolicy,
    pub measurement: Measurement,
    pub big_p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Track the exact accumulated projection error (dense per-sector trace
    /// norms; disable for very large ensembles).
    pub track_compression_error: bool,
}

impl StopwatchConfig {
    pub fn new(n: u32, window_policy: WindowPolicy) -> Self {
        StopwatchConfig {
            n,
            window_policy,
            measurement: Measurement::CovariantOnMemory,
            big_p: 0.9,
            trials: 20_000,
            seed: 1,
            track_compression_error: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolResult {
    /// Final clock state (exact pipeline), or the ideal final state for
    /// parametric runs on moderate ensembles.
    pub final_state: Option<BlockState>,
    pub inaccuracy: InaccuracyReport,
    pub compression_error_total: f64,
    pub memory_qubits_peak: u32,
}

/// Largest ensemble for which parametric runs rebuild dense block states.
const DENSE_STATE_MAX_N: u32 = 128;

fn apply_lag_noise(encoded: &mut EncodedState, lag: &LagNoise) {
    for (_, rec) in encoded.records.iter_mut() {
        let w = rec.kept_two_m.len();
        for a in 0..w {
            for b in 0..w {
                if a == b {
                    continue;
                }
                let dm = (rec.kept_two_m[a] - rec.kept_two_m[b]) as f64 / 2.0;
                let exponent = match lag.model {
                    LagModel::UniformDamping => lag.rate * lag.duration,
                    LagModel::QuadraticPhaseDamping => lag.rate * lag.duration * dm * dm / 2.0,
                };
                rec.kept_block[(a, b)] *= Complex64::new((-exponent).exp(), 0.0);
            }
        }
    }
}

fn measure_errors_exact(
    state: &BlockState,
    true_t: f64,
    config: &StopwatchConfig,
) -> Result<(Vec<f64>, String)> {
    let target = true_t.rem_euclid(TAU);
    match config.measurement {
        Measurement::CovariantOnMemory => {
            let sampler = CovariantSampler::new(state);
            let errs = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = derive_rng(config.seed, 1, trial as u64);
                    circular_distance(sampler.sample(&mut rng), target)
                })
                .collect();
            Ok((errs, "covariant".into()))
        }
        Measurement::LocalOnDecoded => {
            let sampler = LocalPovmSampler::new(state, true_t)?;
            let est = Mle::default();
            let errs = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = derive_rng(config.seed, 1, trial as u64);
                    let outcomes = sampler.sample(&mut rng);
                    circular_distance(est.estimate(&outcomes).t_hat, target)
                })
                .collect();
            Ok((errs, est.id()))
        }
    }
}

/// Coherent stopwatch over the schedule. See the module notes for the
/// gamma = 0 (exact) versus gamma > 0 (parametric) split.
pub fn run_stopwatch(
    config: &StopwatchConfig,
    schedule: &EventSchedule,
    gamma: f64,
) -> Result<ProtocolResult> {
    if config.n < 2 {
        return Err(invalid("stopwatch needs at least 2 clock qubits"));
    }
    schedule.validate()?;
    if gamma < 0.0 {
        return Err(invalid("gamma must be nonnegative"));
    }
    let s = 0.5;
    let total_t = schedule.total();
    if gamma == 0.0 {
        let mut state = ensemble_state(&ClockParams::pure(config.n, 0.0))?;
        let mut eps_total = 0.0;
        let mut peak = 0;
        let k = schedule.events();
        for (j, &dt) in schedule.durations.iter().enumerate() {
            state = rotate_block_state(&state, dt);
            let mut enc = encode(&state, s, config.window_policy)?;
            if enc.memory_qubits_peak() < 1 {
                return Err(Error::Config(
                    "window keeps a single level; no quantum memory survives".into(),
                ));
            }
            peak = peak.max(enc.memory_qubits_peak());
            if config.track_compression_error {
                let clean = decode(&enc, config.n)?;
                eps_total += compression_error(&state, &clean)?.eps_trace;
            }
            if j + 1 < k {
                if let Some(lags) = &schedule.lags {
                    apply_lag_noise(&mut enc, &lags[j]);
                }
            }
            state = decode(&enc, config.n)?;
        }
        let (errs, label) = measure_errors_exact(&state, total_t, config)?;
        let inaccuracy = InaccuracyReport::from_errors(
            &[errs],
            config.big_p,
            config.n as usize,
            label,
            config.seed,
        );
        Ok(ProtocolResult {
            final_state: Some(state),
            inaccuracy,
            compression_error_total: eps_total,
            memory_qubits_peak: peak,
        })
    } else {
        // Parametric run: the clock is ideal between compressions; lag
        // noise folds into extra single-qubit dephasing.
        let mut t_acc = 0.0;
        let mut extra_exponent = 0.0;
        let mut eps_total = 0.0;
        let mut peak = 0;
        let k = schedule.events();
        for (j, &dt) in schedule.durations.iter().enumerate() {
            t_acc += dt;
            let p = 0.5 * (1.0 + (-gamma * t_acc - extra_exponent).exp());
            if config.track_compression_error || config.n <= DENSE_STATE_MAX_N {
                let state = crate::spin::block_state(config.n, t_acc, p, s)?;
                let enc = encode(&state, s, config.window_policy)?;
                peak = peak.max(enc.memory_qubits_peak());
                if config.track_compression_error {
                    let clean = decode(&enc, config.n)?;
                    eps_total += compression_error(&state, &clean)?.eps_trace;
                }
            }
            if j + 1 < k {
                if let Some(lags) = &schedule.lags {
                    extra_exponent += lags[j].rate * lags[j].duration;
                }
            }
        }
        let p_final = 0.5 * (1.0 + (-gamma * t_acc - extra_exponent).exp());
        let target = total_t.rem_euclid(TAU);
        let est = Mle { known_decay: Some(KnownDecay { gamma, tau0: 0.0 }) };
        let n = config.n as usize;
        let errs: Vec<f64> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = derive_rng(config.seed, 1, trial as u64);
                let outcomes: Vec<f64> =
                    (0..n).map(|_| sample_povm_outcome(&mut rng, target, p_final)).collect();
                circular_distance(est.estimate(&outcomes).t_hat, target)
            })
            .collect();
        let inaccuracy =
            InaccuracyReport::from_errors(&[errs], config.big_p, n, est.id(), config.seed);
        let final_state = if config.n <= DENSE_STATE_MAX_N {
            Some(crate::spin::block_state(config.n, t_acc, p_final, s)?)
        } else {
            None
        };
        Ok(ProtocolResult {
            final_state,
            inaccuracy,
            compression_error_total: eps_total,
            memory_qubits_peak: peak,
        })
    }
}

/// Incoherent competitor: every interval measured on a fresh ensemble,
/// estimates added classically.
pub fn run_incoherent(
    config: &StopwatchConfig,
    schedule: &EventSchedule,
    gamma: f64,
) -> Result<ProtocolResult> {
    if config.n < 1 {
        return Err(invalid("need at least one clock qubit"));
    }
    schedule.validate()?;
    let durations = &schedule.durations;
    let label;
    let errs: Vec<f64> = match config.measurement {
        Measurement::CovariantOnMemory => {
            label = "covariant-sum".to_string();
            // one covariant outcome per round on the uncompressed clock
            let samplers: Vec<(f64, CovariantSampler)> = durations
                .iter()
                .map(|&dt| {
                    let p = eigenvalue_from_decay(gamma, dt, 0.0);
                    let st = crate::spin::block_state(config.n, dt, p, 0.5)?;
                    Ok((dt, CovariantSampler::new(&st)))
                })
                .collect::<Result<_>>()?;
            (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = derive_rng(config.seed, 2, trial as u64);
                    let mut err = 0.0;
                    for (dt, sampler) in &samplers {
                        let tau = sampler.sample(&mut rng);
                        err += signed_circular_error(tau, *dt);
                    }
                    err.abs()
                })
                .collect()
        }
        Measurement::LocalOnDecoded => {
            let est = Mle {
                known_decay: if gamma > 0.0 {
                    Some(KnownDecay { gamma, tau0: 0.0 })
                } else {
                    None
                },
            };
            label = format!("{}-sum", est.id());
            let n = config.n as usize;
            (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = derive_rng(config.seed, 2, trial as u64);
                    let mut err = 0.0;
                    for &dt in durations {
                        let p = eigenvalue_from_decay(gamma, dt, 0.0);
                        let target = dt.rem_euclid(TAU);
                        let outcomes: Vec<f64> =
                            (0..n).map(|_| sample_povm_outcome(&mut rng, target, p)).collect();
                        err += signed_circular_error(est.estimate(&outcomes).t_hat, target);
                    }
                    err.abs()
                })
                .collect()
        }
    };
    let inaccuracy =
        InaccuracyReport::from_errors(&[errs], config.big_p, config.n as usize, label, config.seed);
    Ok(ProtocolResult {
        final_state: None,
        inaccuracy,
        compression_error_total: 0.0,
        memory_qubits_peak: 0,
    })
}

/// Signed deviation on the circle, in (-pi, pi].
pub fn signed_circular_error(estimate: f64, truth: f64) -> f64 {
    let d = (estimate - truth).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdvantageReport {
    pub n: u32,
    pub k: u32,
    pub t: f64,
    pub gamma: f64,
    pub big_p: f64,
    /// delta_incoherent / delta_coherent; above 1 means coherent wins.
    pub ratio: f64,
    pub delta_coherent: f64,
    pub delta_incoherent: f64,
    /// sqrt(n)-rescaled inaccuracies.
    pub rescaled_delta_coherent: f64,
    pub rescaled_delta_incoherent: f64,
    pub mode: String,
}

#[derive(Clone, Copy, Debug)]
pub enum RatioMode {
    /// Closed-form Fisher ratio sqrt(k F(T) / F(T/k)).
    Analytic,
    /// Monte Carlo over both protocols.
    Simulated { config: StopwatchConfig },
}

pub fn advantage_ratio(
    n: u32,
    k: u32,
    t: f64,
    gamma: f64,
    big_p: f64,
    mode: RatioMode,
) -> Result<AdvantageReport> {
    if t <= 0.0 || k < 1 {
        return Err(invalid("need positive total duration and k >= 1"));
    }
    let sqn = (n as f64).sqrt();
    match mode {
        RatioMode::Analytic => {
            let f_coh = crate::estimation::fisher_noisy_known(gamma, t);
            let f_inc = crate::estimation::fisher_noisy_known(gamma, t / k as f64);
            let delta_coh = inaccuracy_analytic(n as usize, big_p, f_coh);
            let delta_inc = (k as f64).sqrt() * inaccuracy_analytic(n as usize, big_p, f_inc);
            Ok(AdvantageReport {
                n,
                k,
                t,
                gamma,
                big_p,
                ratio: delta_inc / delta_coh,
                delta_coherent: delta_coh,
                delta_incoherent: delta_inc,
                rescaled_delta_coherent: sqn * delta_coh,
                rescaled_delta_incoherent: sqn * delta_inc,
                mode: "analytic".into(),
            })
        }
        RatioMode::Simulated { config } => {
            let schedule = EventSchedule::equal(k, t);
            let coh = run_stopwatch(&config, &schedule, gamma)?;
            let inc = run_incoherent(&config, &schedule, gamma)?;
            let delta_coh = coh.inaccuracy.delta;
            let delta_inc = inc.inaccuracy.delta;
            Ok(AdvantageReport {
                n,
                k,
                t,
                gamma,
                big_p,
                ratio: delta_inc / delta_coh,
                delta_coherent: delta_coh,
                delta_incoherent: delta_inc,
                rescaled_delta_coherent: sqn * delta_coh,
                rescaled_delta_incoherent: sqn * delta_inc,
                mode: "simulated".into(),
            })
        }
    }
}

/// Coherent beats incoherent iff k F(T) >= F(T/k).
pub fn crossover_condition(k: u32, t: f64, gamma: f64) -> bool {
    assert!(k >= 1 && t > 0.0 && gamma >= 0.0);
    let lhs = k as f64 * crate::estimation::fisher_noisy_known(gamma, t);
    let rhs = crate::estimation::fisher_noisy_known(gamma, t / k as f64);
    lhs >= rhs
}

#[derive(Clone, Debug, Serialize)]
pub struct NetworkResult {
    /// Point estimate of the total phase Σ omega_j T0 (circular mean of
    /// the measured outcomes).
    pub phase_estimate: f64,
    /// Point estimate of Σ omega_j.
    pub frequency_sum_estimate: f64,
    pub inaccuracy: InaccuracyReport,
    /// Quantum communication cost: window qubits forwarded per hop.
    pub qubit_cost: u32,
    /// Total phase left the unambiguous window.
    pub ambiguity: bool,
    pub compression_error_total: f64,
}

/// Sequential frequency-sum protocol: each node imprints omega_j T0 on the
/// travelling memory, compresses, and forwards it.
pub fn network_sequential(
    node_frequencies: &[f64],
    t0: f64,
    n: u32,
    config: &StopwatchConfig,
) -> Result<NetworkResult> {
    if node_frequencies.is_empty() || t0 <= 0.0 {
        return Err(invalid("need at least one node and a positive interaction time"));
    }
    if node_frequencies.iter().any(|&w| w <= 0.0) {
        return Err(invalid("node frequencies must be positive"));
    }
    let phases: Vec<f64> = node_frequencies.iter().map(|&w| w * t0).collect();
    let phi_tot: f64 = phases.iter().sum();
    let ambiguity = phi_tot >= TAU - 0.1;
    let schedule = EventSchedule { durations: phases, lags: None };
    let mut cfg = *config;
    cfg.n = n;
    let run = run_stopwatch(&cfg, &schedule, 0.0)?;
    // circular mean of covariant outcomes as the point estimate
    let state = run.final_state.as_ref().expect("exact pipeline keeps the state");
    let sampler = CovariantSampler::new(state);
    let point_trials = config.trials.min(20_000).max(1_000);
    let (mut c, mut s) = (0.0, 0.0);
    for trial in 0..point_trials {
        let mut rng = derive_rng(config.seed, 3, trial as u64);
        let tau = sampler.sample(&mut rng);
        c += tau.cos();
        s += tau.sin();
    }
    let phase_estimate = s.atan2(c).rem_euclid(TAU);
    let k = node_frequencies.len() as u32;
    Ok(NetworkResult {
        phase_estimate,
        frequency_sum_estimate: phase_estimate / t0,
        inaccuracy: run.inaccuracy,
        qubit_cost: k * run.memory_qubits_peak,
        ambiguity,
        compression_error_total: run.compression_error_total,
    })
}

/// Accounting for imperfect encode/decode circuitry: gate error eps1 over k
/// iterations of an n^4 log2(n) gate-count transform adds
/// eps_circuit = k eps1 n^4 log2(n) of trace-distance error and
/// eps_circuit / sqrt(n) of inaccuracy.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CircuitErrorBudget {
    pub eps_circuit: f64,
    pub delta_penalty: f64,
}

pub fn circuit_error_budget(k: u32, eps1: f64, n: u32) -> CircuitErrorBudget {
    assert!(eps1 >= 0.0 && n >= 2);
    let nf = n as f64;
    let eps_circuit = k as f64 * eps1 * nf.powi(4) * nf.log2();
    CircuitErrorBudget { eps_circuit, delta_penalty: eps_circuit / nf.sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compressor::overall_error_bound;
    use approx::assert_abs_diff_eq;

    fn quick_config(n: u32, policy: WindowPolicy) -> StopwatchConfig {
        let mut c = StopwatchConfig::new(n, policy);
        c.trials = 4_000;
        c.seed = 99;
        c
    }

    #[test]
    fn lossless_stopwatch_reproduces_ideal_state() {
        // window wide enough to keep every level: final state is the ideal
        // evolved ensemble, and the tracked error vanishes.
        let config = quick_config(6, WindowPolicy::QubitBudget(4));
        let schedule = EventSchedule { durations: vec![0.4, 0.7, 0.2], lags: None };
        let run = run_stopwatch(&config, &schedule, 0.0).unwrap();
        assert!(run.compression_error_total < 1e-12);
        let want = ensemble_state(&ClockParams::pure(6, 1.3)).unwrap();
        let got = run.final_state.unwrap();
        for (a, b) in want.entries.iter().zip(got.entries.iter()) {
            let defect = (&a.block.mat - &b.block.mat).map(|z| z.norm()).max();
            assert!(defect < 1e-10, "defect {defect:.2e}");
        }
    }

    #[test]
    fn single_event_stopwatch_matches_plain_estimation() {
        // k = 1, lossless window, gamma = 0: delta agrees with the
        // analytic local form within Monte Carlo tolerance.
        let mut config = quick_config(8, WindowPolicy::QubitBudget(4));
        config.trials = 20_000;
        config.measurement = Measurement::LocalOnDecoded;
        let run = run_stopwatch(&config, &EventSchedule::equal(1, 1.0), 0.0).unwrap();
        let want = inaccuracy_analytic(8, 0.9, 1.0);
        let rel = (run.inaccuracy.delta - want).abs() / want;
        assert!(rel < 0.12, "delta {} vs {want}", run.inaccuracy.delta);
    }

    #[test]
    fn incoherent_error_grows_with_sqrt_k() {
        let mut config = quick_config(8, WindowPolicy::Asymptotic);
        config.trials = 20_000;
        let one = run_incoherent(&config, &EventSchedule::equal(1, 0.9), 0.0).unwrap();
        let four = run_incoherent(&config, &EventSchedule::equal(4, 3.6), 0.0).unwrap();
        let growth = four.inaccuracy.delta / one.inaccuracy.delta;
        assert!((growth - 2.0).abs() < 0.25, "growth {growth}");
    }

    #[test]
    fn tracked_error_stays_below_storage_bound() {
        // n = 64, k = 4, gamma = 0.2, T = 1.
        let mut config = quick_config(64, WindowPolicy::Asymptotic);
        config.trials = 400;
        let run = run_stopwatch(&config, &EventSchedule::equal(4, 1.0), 0.2).unwrap();
        let bound = overall_error_bound(64, 4, 1.0, 0.2).unwrap();
        assert!(
            run.compression_error_total <= bound,
            "eps {} above bound {bound}",
            run.compression_error_total
        );
    }

    #[test]
    fn analytic_ratio_is_sqrt_k_without_noise() {
        for k in [1u32, 2, 5, 9] {
            let rep = advantage_ratio(100, k, 1.0, 0.0, 0.9, RatioMode::Analytic).unwrap();
            assert_abs_diff_eq!(rep.ratio, (k as f64).sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn crossover_holds_with_equality_at_k_one() {
        assert!(crossover_condition(1, 1.0, 0.3));
        // gamma = 0.2, T = 1: advantage region includes k = 2 here
        assert!(crossover_condition(2, 1.0, 0.2));
        // large T kills the advantage for small k
        assert!(!crossover_condition(2, 8.0, 0.5));
    }

    #[test]
    fn crossover_eventually_true_for_large_k() {
        for &(gamma, t) in &[(0.2, 1.0), (0.5, 4.0), (1.0, 6.0)] {
            let mut k = 1;
            while k < 4096 && !crossover_condition(k, t, gamma) {
                k *= 2;
            }
            assert!(crossover_condition(k, t, gamma), "no crossover up to k={k}");
        }
    }

    #[test]
    fn lag_noise_degrades_but_preserves_state_validity() {
        let config = quick_config(6, WindowPolicy::Asymptotic);
        let lag = LagNoise { rate: 0.5, duration: 1.0, model: LagModel::UniformDamping };
        let schedule =
            EventSchedule { durations: vec![0.5, 0.5], lags: Some(vec![lag]) };
        let noisy = run_stopwatch(&config, &schedule, 0.0).unwrap();
        noisy.final_state.as_ref().unwrap().validate().unwrap();
        let clean =
            run_stopwatch(&config, &EventSchedule { durations: vec![0.5, 0.5], lags: None }, 0.0)
                .unwrap();
        assert!(noisy.inaccuracy.delta >= clean.inaccuracy.delta - 0.05);
    }

    #[test]
    fn network_estimates_frequency_sum() {
        let mut config = quick_config(64, WindowPolicy::Asymptotic);
        config.trials = 4_000;
        let freqs = [0.3, 0.5, 0.4];
        let res = network_sequential(&freqs, 1.0, 64, &config).unwrap();
        assert!(!res.ambiguity);
        let want: f64 = freqs.iter().sum();
        assert!((res.frequency_sum_estimate - want).abs() < 0.1, "{}", res.frequency_sum_estimate);
        assert!(res.qubit_cost >= 3 && res.qubit_cost < 3 * 64);
    }

    #[test]
    fn circuit_budget_is_monotone() {
        let base = circuit_error_budget(4, 1e-9, 16);
        assert!(circuit_error_budget(8, 1e-9, 16).eps_circuit > base.eps_circuit);
        assert!(circuit_error_budget(4, 2e-9, 16).eps_circuit > base.eps_circuit);
        assert!(circuit_error_budget(4, 1e-9, 32).eps_circuit > base.eps_circuit);
        assert_abs_diff_eq!(
            base.eps_circuit,
            4.0 * 1e-9 * 16f64.powi(4) * 4.0,
            epsilon = 1e-18
        );
    }
}
