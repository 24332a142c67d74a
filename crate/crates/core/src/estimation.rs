//! Time estimation from covariant single-qubit measurements.
//!
//! Each clock qubit is measured with the phase-covariant POVM whose outcome
//! density is (1/2pi)(1 + (2p-1) cos(tau - t)); a maximum-likelihood
//! estimator (optionally with the decay rate pinned) turns an outcome list
//! into a time estimate. The operational figure of merit is the inaccuracy
//! delta(P): the smallest interval width, centred on the true value, that
//! captures the estimate with probability at least P, taken worst-case over
//! a fiducial time grid.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::rng::derive_rng;
use crate::special::erf_inv;

/// Outcome density of the covariant qubit measurement.
pub fn povm_pdf(tau: f64, t: f64, p: f64) -> f64 {
    debug_assert!((0.5..=1.0).contains(&p));
    (1.0 + (2.0 * p - 1.0) * (tau - t).cos()) / TAU
}

/// Outcomes of n independent covariant qubit measurements.
#[derive(Clone, Debug, Serialize)]
pub struct MeasurementSample {
    pub outcomes: Vec<f64>,
    pub true_t: f64,
    pub true_p: f64,
    pub rng_seed: u64,
}

/// One rejection-sampled draw from the covariant outcome density.
pub fn sample_povm_outcome<R: Rng + ?Sized>(rng: &mut R, t: f64, p: f64) -> f64 {
    let r = 2.0 * p - 1.0;
    loop {
        let tau = rng.random::<f64>() * TAU;
        let u = rng.random::<f64>() * (1.0 + r);
        if u <= 1.0 + r * (tau - t).cos() {
            return tau;
        }
    }
}

/// n i.i.d. draws, bitwise reproducible under a fixed seed.
pub fn sample_outcomes(n: usize, t: f64, p: f64, seed: u64) -> Result<MeasurementSample> {
    if n < 1 {
        return Err(invalid("need at least one measurement"));
    }
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid(format!("eigenvalue p = {p} outside [1/2, 1]")));
    }
    let mut rng = derive_rng(seed, 0, 0);
    let outcomes = (0..n).map(|_| sample_povm_outcome(&mut rng, t, p)).collect();
    Ok(MeasurementSample { outcomes, true_t: t.rem_euclid(TAU), true_p: p, rng_seed: seed })
}

/// Point estimate produced by a [`TimeEstimator`].
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    /// Estimated time in [0, 2pi).
    pub t_hat: f64,
    pub p_hat: Option<f64>,
    /// Set when the likelihood was flat in p and a circular-mean fallback
    /// was returned.
    pub plateau: bool,
}

pub trait TimeEstimator: Sync {
    fn estimate(&self, outcomes: &[f64]) -> Estimate;
    fn id(&self) -> String;
}

/// Circular-mean estimator; also the warm start for the likelihood search.
#[derive(Clone, Copy, Debug, Default)]
pub struct CircularMean;

fn circular_mean_seed(outcomes: &[f64]) -> (f64, f64) {
    let (mut c, mut s) = (0.0, 0.0);
    for &tau in outcomes {
        c += tau.cos();
        s += tau.sin();
    }
    let n = outcomes.len() as f64;
    let t0 = s.atan2(c).rem_euclid(TAU);
    // E[exp(i(tau - t))] = r/2, so twice the resultant length estimates r.
    let r0 = (2.0 * (c * c + s * s).sqrt() / n).clamp(0.0, R_MAX);
    (t0, r0)
}

impl TimeEstimator for CircularMean {
    fn estimate(&self, outcomes: &[f64]) -> Estimate {
        let (t0, r0) = circular_mean_seed(outcomes);
        Estimate { t_hat: t0, p_hat: Some((1.0 + r0) / 2.0), plateau: false }
    }

    fn id(&self) -> String {
        "circular-mean".into()
    }
}

/// Pinned decay model: p(T) = (1 + exp(-gamma (T + tau0)))/2.
#[derive(Clone, Copy, Debug)]
pub struct KnownDecay {
    pub gamma: f64,
    pub tau0: f64,
}

/// Maximum-likelihood estimator over (T, p); with [`KnownDecay`] supplied,
/// p follows T and only the time is optimized.
#[derive(Clone, Copy, Debug, Default)]
pub struct Mle {
    pub known_decay: Option<KnownDecay>,
}

const R_MAX: f64 = 1.0 - 1e-9;
const PLATEAU_R: f64 = 2e-3; // p_hat below 0.501

fn log_likelihood(outcomes: &[f64], t: f64, r: f64) -> f64 {
    outcomes.iter().map(|&tau| (1.0 + r * (tau - t).cos()).max(1e-300).ln()).sum()
}

/// One bounded Newton ascent in (T, r) from the given start; backtracks on
/// non-increase and projects r into [0, R_MAX].
fn newton_free(outcomes: &[f64], mut t: f64, mut r: f64) -> (f64, f64, f64) {
    let mut ll = log_likelihood(outcomes, t, r);
    for _ in 0..80 {
        let (mut gt, mut gr, mut htt, mut htr, mut hrr) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &tau in outcomes {
            let c = (tau - t).cos();
            let s = (tau - t).sin();
            let den = 1.0 + r * c;
            let d2 = den * den;
            gt += r * s / den;
            gr += c / den;
            htt -= r * (c + r) / d2;
            htr += s / d2;
            hrr -= c * c / d2;
        }
        let det = htt * hrr - htr * htr;
        let (mut dt, mut dr) = if det > 1e-12 && htt < 0.0 {
            ((-gt * hrr + gr * htr) / det, (-gr * htt + gt * htr) / det)
        } else {
            // gradient ascent fallback with a conservative scale
            let scale = 1.0 / (1.0 + outcomes.len() as f64);
            (gt * scale, gr * scale)
        };
        // backtracking line search
        let mut improved = false;
        for _ in 0..25 {
            let t_new = t + dt;
            let r_new = (r + dr).clamp(0.0, R_MAX);
            let ll_new = log_likelihood(outcomes, t_new, r_new);
            if ll_new > ll {
                t = t_new.rem_euclid(TAU);
                r = r_new;
                improved = true;
                let gain = ll_new - ll;
                ll = ll_new;
                if gain < 1e-12 * (1.0 + ll.abs()) {
                    return (t, r, ll);
                }
                break;
            }
            dt *= 0.5;
            dr *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (t, r, ll)
}

fn newton_known(outcomes: &[f64], decay: KnownDecay, mut t: f64) -> (f64, f64) {
    let r_of = |t: f64| (-decay.gamma * (t.max(0.0) + decay.tau0)).exp().clamp(0.0, R_MAX);
    let ll_of = |t: f64| log_likelihood(outcomes, t, r_of(t));
    let grad = |t: f64| {
        let r = r_of(t);
        let rp = -decay.gamma * r;
        outcomes
            .iter()
            .map(|&tau| {
                let c = (tau - t).cos();
                let s = (tau - t).sin();
                (rp * c + r * s) / (1.0 + r * c)
            })
            .sum::<f64>()
    };
    let mut ll = ll_of(t);
    for _ in 0..80 {
        let g = grad(t);
        let h = (grad(t + 1e-6) - grad(t - 1e-6)) / 2e-6;
        let mut step = if h < -1e-9 { -g / h } else { g / (1.0 + outcomes.len() as f64) };
        let mut improved = false;
        for _ in 0..25 {
            let t_new = (t + step).rem_euclid(TAU);
            let ll_new = ll_of(t_new);
            if ll_new > ll {
                let gain = ll_new - ll;
                t = t_new;
                ll = ll_new;
                improved = true;
                if gain < 1e-12 * (1.0 + ll.abs()) {
                    return (t, ll);
                }
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (t, ll)
}

impl TimeEstimator for Mle {
    fn estimate(&self, outcomes: &[f64]) -> Estimate {
        let (t0, r0) = circular_mean_seed(outcomes);
        let starts = [t0, (t0 + TAU / 3.0).rem_euclid(TAU), (t0 - TAU / 3.0).rem_euclid(TAU)];
        match self.known_decay {
            None => {
                let mut best = (t0, r0, f64::NEG_INFINITY);
                for &ts in &starts {
                    let cand = newton_free(outcomes, ts, r0.max(0.05));
                    if cand.2 > best.2 {
                        best = cand;
                    }
                }
                let (t_hat, r_hat, _) = best;
                if r_hat < PLATEAU_R {
                    // flat likelihood in p: report the circular mean
                    return Estimate { t_hat: t0, p_hat: Some(0.5), plateau: true };
                }
                Estimate { t_hat, p_hat: Some((1.0 + r_hat) / 2.0), plateau: false }
            }
            Some(decay) => {
                let mut best = (t0, f64::NEG_INFINITY);
                for &ts in &starts {
                    let cand = newton_known(outcomes, decay, ts);
                    if cand.1 > best.1 {
                        best = cand;
                    }
                }
                let t_hat = best.0;
                let p_hat = 0.5 * (1.0 + (-decay.gamma * (t_hat + decay.tau0)).exp());
                Estimate { t_hat, p_hat: Some(p_hat), plateau: false }
            }
        }
    }

    fn id(&self) -> String {
        match self.known_decay {
            None => "mle".into(),
            Some(d) => format!("mle-known-gamma={}", d.gamma),
        }
    }
}

/// Convenience wrapper returning (t_hat, p_hat).
pub fn mle_estimate(sample: &MeasurementSample, known_decay: Option<KnownDecay>) -> Result<(f64, f64)> {
    if sample.outcomes.len() < 2 {
        return Err(invalid("maximum-likelihood estimation needs at least 2 outcomes"));
    }
    let est = Mle { known_decay }.estimate(&sample.outcomes);
    Ok((est.t_hat, est.p_hat.unwrap_or(0.5)))
}

/// Fisher information of the covariant measurement at fixed eigenvalue p.
pub fn fisher_local(p: f64) -> f64 {
    assert!((0.5..=1.0).contains(&p), "p = {p} outside [1/2, 1]");
    1.0 - 2.0 * (p * (1.0 - p)).sqrt()
}

/// Fisher information when the decay rate is known, so the eigenvalue's own
/// time dependence contributes: 1 - g² - Q + g²/Q with Q = sqrt(1-e^{-2gT}).
/// The gT -> 0 limit is 1.
pub fn fisher_noisy_known(gamma: f64, t: f64) -> f64 {
    assert!(gamma >= 0.0 && t >= 0.0);
    if gamma * t == 0.0 {
        return 1.0;
    }
    let q = (1.0 - (-2.0 * gamma * t).exp()).sqrt();
    1.0 - gamma * gamma - q + gamma * gamma / q
}

/// Effective Fisher information with the decay rate treated as a nuisance
/// parameter: the (T,T) entry of the inverse Fisher matrix reduces to
/// 1 - sqrt(1 - e^{-2gT}) because the off-diagonal entries vanish.
pub fn fisher_noisy_nuisance(gamma: f64, t: f64) -> f64 {
    assert!(gamma >= 0.0 && t >= 0.0);
    if gamma * t == 0.0 {
        return 1.0;
    }
    1.0 - (1.0 - (-2.0 * gamma * t).exp()).sqrt()
}

/// Leading-order inaccuracy sqrt(8/(nF)) erfinv(P).
pub fn inaccuracy_analytic(n: usize, big_p: f64, fisher: f64) -> f64 {
    assert!(n >= 1 && big_p > 0.0 && big_p < 1.0);
    if fisher <= 0.0 {
        return f64::INFINITY;
    }
    (8.0 / (n as f64 * fisher)).sqrt() * erf_inv(big_p)
}

/// Distance on the circle, in [0, pi].
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Smallest delta with empirical coverage >= P: twice the ceil(P N)-th
/// order statistic of the absolute errors.
pub fn delta_from_errors(abs_errors: &[f64], big_p: f64) -> f64 {
    assert!(!abs_errors.is_empty());
    let mut sorted = abs_errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let idx = ((big_p * n as f64).ceil() as usize).clamp(1, n) - 1;
    2.0 * sorted[idx]
}

/// Percentile bootstrap (resampling within each fiducial point, maximizing
/// across the grid) for the inaccuracy.
pub fn bootstrap_delta_ci(
    errors_by_t: &[Vec<f64>],
    big_p: f64,
    resamples: usize,
    seed: u64,
) -> (f64, f64) {
    let replicas: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = derive_rng(seed, u64::MAX, b as u64);
            errors_by_t
                .iter()
                .map(|errs| {
                    let n = errs.len();
                    let resampled: Vec<f64> =
                        (0..n).map(|_| errs[rng.random_range(0..n)]).collect();
                    delta_from_errors(&resampled, big_p)
                })
                .fold(0.0f64, f64::max)
        })
        .collect();
    let mut sorted = replicas;
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[((0.025 * sorted.len() as f64) as usize).min(sorted.len() - 1)];
    let hi = sorted[((0.975 * sorted.len() as f64) as usize).min(sorted.len() - 1)];
    (lo, hi)
}

/// Worst-case empirical inaccuracy over a fiducial grid.
#[derive(Clone, Debug, Serialize)]
pub struct InaccuracyReport {
    pub big_p: f64,
    pub delta: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub n: usize,
    pub estimator: String,
    /// Set when no interval up to the full circle reaches the requested
    /// coverage.
    pub saturated: bool,
}

impl InaccuracyReport {
    pub fn from_errors(
        errors_by_t: &[Vec<f64>],
        big_p: f64,
        n: usize,
        estimator: String,
        seed: u64,
    ) -> Self {
        let trials = errors_by_t.first().map(|v| v.len()).unwrap_or(0);
        let delta = errors_by_t
            .iter()
            .map(|errs| delta_from_errors(errs, big_p))
            .fold(0.0f64, f64::max);
        let (ci_low, ci_high) = bootstrap_delta_ci(errors_by_t, big_p, 1000, seed);
        InaccuracyReport {
            big_p,
            delta,
            ci_low,
            ci_high,
            trials,
            n,
            estimator,
            saturated: delta >= TAU - 1e-12,
        }
    }
}

/// Default fiducial grid: [0.1, 2pi - 0.1] for noiseless runs, capped at
/// 5/gamma when dephasing makes large times uninformative.
pub fn default_fiducial_grid(gamma: f64, points: usize) -> Vec<f64> {
    let lo = 0.1;
    let hi = if gamma > 0.0 { (5.0 / gamma).min(TAU - 0.1) } else { TAU - 0.1 };
    let k = points.max(2);
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
}

/// Monte Carlo estimate of the worst-case inaccuracy of `estimator` on n
/// product clock qubits with eigenvalue p.
pub fn inaccuracy_empirical(
    estimator: &dyn TimeEstimator,
    n: usize,
    p: f64,
    t_grid: &[f64],
    big_p: f64,
    trials: usize,
    seed: u64,
) -> Result<InaccuracyReport> {
    if trials < 100 {
        return Err(invalid("need at least 100 trials"));
    }
    if t_grid.is_empty() {
        return Err(invalid("fiducial grid must be nonempty"));
    }
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid(format!("eigenvalue p = {p} outside [1/2, 1]")));
    }
    let errors_by_t: Vec<Vec<f64>> = t_grid
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = derive_rng(seed, ti as u64, trial as u64);
                    let outcomes: Vec<f64> =
                        (0..n).map(|_| sample_povm_outcome(&mut rng, t, p)).collect();
                    circular_distance(estimator.estimate(&outcomes).t_hat, t)
                })
                .collect()
        })
        .collect();
    Ok(InaccuracyReport::from_errors(&errors_by_t, big_p, n, estimator.id(), seed))
}

/// Inaccuracy floor P ΔT / (D+1) from the effective dimension D.
pub fn size_accuracy_bound(effective_dim: f64, delta_t: f64, big_p: f64) -> f64 {
    assert!(effective_dim >= 1.0 && delta_t > 0.0 && (0.0..=1.0).contains(&big_p));
    big_p * delta_t / (effective_dim + 1.0)
}

/// Memory floor log2(1/delta).
pub fn memory_bound(delta: f64) -> f64 {
    assert!(delta > 0.0);
    (1.0 / delta).log2()
}

/// Measured inaccuracy must sit above the size-accuracy floor.
pub fn check_size_accuracy(measured_delta: f64, effective_dim: f64, delta_t: f64, big_p: f64) -> bool {
    measured_delta + 1e-12 >= size_accuracy_bound(effective_dim, delta_t, big_p)
}

/// Memory check q + slack >= log2(1/delta); returns (ok, margin in qubits).
pub fn check_memory_bound(memory_qubits: u32, delta: f64, slack: f64) -> (bool, f64) {
    let margin = memory_qubits as f64 + slack - memory_bound(delta);
    (margin >= 0.0, margin)
}
