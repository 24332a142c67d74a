//! Single-qubit clock states, dephasing evolution and ensemble constructors.
//!
//! A clock qubit prepared in sqrt(s)|0> + sqrt(1-s) e^{-it}|1> accumulates
//! relative phase at unit rate (energy splitting over hbar fixed to 1).
//! Dephasing at rate gamma shrinks the coherence without touching
//! populations, leaving the state with eigenvalues (p, 1-p),
//! p = (1 + exp(-gamma (t + tau0)))/2; p is always the larger eigenvalue.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linalg::{hermiticity_defect, min_eigenvalue, trace, CMat};
use crate::spin::{block_state, BlockEntry, BlockState, SpinBlock};

/// Noise parameterization of a clock ensemble: either a fixed eigenvalue or
/// a decay rate with a preparation-dephasing offset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum NoiseParam {
    /// Larger single-qubit eigenvalue p in [1/2, 1].
    Eigenvalue(f64),
    /// Dephasing rate gamma >= 0 and preparation offset tau0 >= 0; the
    /// effective eigenvalue then depends on elapsed time.
    Decay { gamma: f64, tau0: f64 },
}

/// Full specification of an i.i.d. clock ensemble.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClockParams {
    pub n: u32,
    /// Elapsed time in units of the inverse level splitting.
    pub t: f64,
    pub noise: NoiseParam,
    /// Amplitude split of the initial superposition, default 1/2.
    pub s: f64,
}

impl ClockParams {
    pub fn pure(n: u32, t: f64) -> Self {
        ClockParams { n, t, noise: NoiseParam::Eigenvalue(1.0), s: 0.5 }
    }

    pub fn with_eigenvalue(n: u32, t: f64, p: f64) -> Self {
        ClockParams { n, t, noise: NoiseParam::Eigenvalue(p), s: 0.5 }
    }

    pub fn with_decay(n: u32, t: f64, gamma: f64) -> Self {
        ClockParams { n, t, noise: NoiseParam::Decay { gamma, tau0: 0.0 }, s: 0.5 }
    }

    /// Effective eigenvalue at the configured time.
    pub fn eigenvalue(&self) -> Result<f64> {
        match self.noise {
            NoiseParam::Eigenvalue(p) => {
                if !(0.5..=1.0).contains(&p) {
                    return Err(invalid(format!("eigenvalue p = {p} outside [1/2, 1]")));
                }
                Ok(p)
            }
            NoiseParam::Decay { gamma, tau0 } => {
                if gamma < 0.0 || tau0 < 0.0 {
                    return Err(invalid(format!(
                        "decay parameters must be nonnegative, got gamma={gamma}, tau0={tau0}"
                    )));
                }
                Ok(eigenvalue_from_decay(gamma, self.t, tau0))
            }
        }
    }
}

/// p = (1 + exp(-gamma (t + tau0)))/2.
pub fn eigenvalue_from_decay(gamma: f64, t: f64, tau0: f64) -> f64 {
    0.5 * (1.0 + (-gamma * (t + tau0)).exp())
}

/// Single-qubit clock state p|phi_t><phi_t| + (1-p)|phi_t^perp><phi_t^perp|
/// in the computational basis.
pub fn qubit_clock_state(t: f64, p: f64, s: f64) -> Result<CMat> {
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid(format!("eigenvalue p = {p} outside [1/2, 1]")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("amplitude parameter s = {s} outside (0, 1)")));
    }
    let mut m = CMat::zeros(2, 2);
    let cross = (2.0 * p - 1.0) * (s * (1.0 - s)).sqrt();
    m[(0, 0)] = Complex64::new(p * s + (1.0 - p) * (1.0 - s), 0.0);
    m[(1, 1)] = Complex64::new(p * (1.0 - s) + (1.0 - p) * s, 0.0);
    m[(0, 1)] = Complex64::from_polar(cross, t);
    m[(1, 0)] = Complex64::from_polar(cross, -t);
    Ok(m)
}

fn check_density_2x2(state: &CMat) -> Result<()> {
    if state.nrows() != 2 || state.ncols() != 2 {
        return Err(invalid("expected a 2x2 density matrix"));
    }
    if hermiticity_defect(state) > 1e-10 {
        return Err(invalid("input is not Hermitian"));
    }
    if (trace(state).re - 1.0).abs() > 1e-10 {
        return Err(invalid("input trace differs from 1"));
    }
    if min_eigenvalue(state) < -1e-10 {
        return Err(invalid("input is not positive semidefinite"));
    }
    Ok(())
}

/// Closed-form dephasing evolution over duration `t` at rate `gamma`:
/// populations fixed, the |0><1| coherence picks up exp(i t) exp(-gamma t)
/// (the excited level accumulates exp(-i t) of relative phase).
pub fn evolve_dephasing(state: &CMat, t: f64, gamma: f64) -> Result<CMat> {
    if t < 0.0 || gamma < 0.0 {
        return Err(invalid(format!("duration and rate must be nonnegative, got t={t}, gamma={gamma}")));
    }
    check_density_2x2(state)?;
    let mut out = state.clone();
    let factor = Complex64::from_polar((-gamma * t).exp(), t);
    out[(0, 1)] *= factor;
    out[(1, 0)] *= factor.conj();
    Ok(out)
}

/// Ensemble state: thin wrapper over the block constructor with the noise
/// parameterization translated to an effective eigenvalue.
pub fn ensemble_state(params: &ClockParams) -> Result<BlockState> {
    let p = params.eigenvalue()?;
    block_state(params.n, params.t, p, params.s)
}

/// Exchangeable mixture Σ w_i rho_{t, p_i}^{(x)n}: convex combination of
/// block states, sector by sector.
pub fn ensemble_mixture(n: u32, t: f64, components: &[(f64, f64)], s: f64) -> Result<BlockState> {
    if components.is_empty() {
        return Err(invalid("mixture needs at least one component"));
    }
    let wsum: f64 = components.iter().map(|(w, _)| w).sum();
    if (wsum - 1.0).abs() > 1e-12 || components.iter().any(|(w, _)| *w < 0.0) {
        return Err(invalid("mixture weights must be nonnegative and sum to 1"));
    }
    let states: Vec<BlockState> = components
        .iter()
        .map(|&(_, p)| block_state(n, t, p, s))
        .collect::<Result<_>>()?;
    let spins = crate::spin::spins_for_ensemble(n);
    let mut entries = Vec::new();
    for spin in spins {
        let mut q_mix = 0.0;
        let mut acc = CMat::zeros(spin.dim(), spin.dim());
        for (state, &(w, _)) in states.iter().zip(components.iter()) {
            if let Some(e) = state.entry(spin) {
                q_mix += w * e.weight;
                acc += e.block.mat.clone() * Complex64::new(w * e.weight, 0.0);
            }
        }
        if q_mix > 0.0 {
            acc /= Complex64::new(q_mix, 0.0);
            entries.push(BlockEntry {
                spin,
                weight: q_mix,
                block: SpinBlock { spin, mat: acc },
                ln_mult: crate::spin::ln_multiplicity(n, spin),
            });
        }
    }
    Ok(BlockState { n, entries })
}

/// Blockwise unitary evolution by duration `dt`: every block element (m, m')
/// is multiplied by exp(-i (m - m') dt). Exact for gamma = 0.
pub fn rotate_block_state(state: &BlockState, dt: f64) -> BlockState {
    let entries = state
        .entries
        .iter()
        .map(|e| {
            let dim = e.spin.dim();
            let mat = CMat::from_fn(dim, dim, |i, ip| {
                e.block.mat[(i, ip)] * Complex64::from_polar(1.0, dt * (i as f64 - ip as f64))
            });
            BlockEntry {
                spin: e.spin,
                weight: e.weight,
                block: SpinBlock { spin: e.spin, mat },
                ln_mult: e.ln_mult,
            }
        })
        .collect();
    BlockState { n: state.n, entries }
}
