//! Measurement simulation on block-diagonal ensemble states.
//!
//! Two measurement families are supported:
//! * the canonical covariant phase measurement on the rotation register
//!   (one outcome per shot, preceded by a non-disturbing spin readout), and
//! * independent covariant qubit measurements on the full ensemble,
//!   simulated exactly by purifying the block state (sector, eigenvector,
//!   multiplicity path) and contracting one qubit at a time.
//!
//! Both samplers draw from exact outcome densities via rejection, so their
//! statistics match the states to machine precision.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::linalg::real_part;
use crate::schur_basis::{path_basis, PathTable};
use crate::spin::{BlockState, Spin};

/// Eigencomponents of a block state whose blocks are phase-conjugated real
/// matrices (everything this crate constructs): probability, sector and the
/// complex eigenvector in the energy basis, phases included.
pub fn block_eigencomponents(state: &BlockState, t: f64) -> Result<Vec<(Spin, f64, Vec<Complex64>)>> {
    let mut comps = Vec::new();
    for e in &state.entries {
        let dim = e.spin.dim();
        // strip phases: sigma0[i,i'] = sigma[i,i'] exp(-i t (i - i'))
        let mut real = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for ip in 0..dim {
                real[(i, ip)] =
                    e.block.mat[(i, ip)] * Complex64::from_polar(1.0, -t * (i as f64 - ip as f64));
            }
        }
        let defect = crate::linalg::max_imag(&real);
        if defect > 1e-8 {
            return Err(invalid(format!(
                "block J = {} is not phase-conjugated real at t = {t} (defect {defect:.2e})",
                e.spin.j()
            )));
        }
        let se = real_part(&real).symmetric_eigen();
        let total: f64 = se.eigenvalues.iter().map(|l| l.max(0.0)).sum();
        for (k, &lam) in se.eigenvalues.iter().enumerate() {
            let w = lam.max(0.0) / total;
            if w < 1e-15 {
                continue;
            }
            let vec: Vec<Complex64> = (0..dim)
                .map(|i| {
                    Complex64::from_polar(1.0, t * i as f64) * se.eigenvectors[(i, k)]
                })
                .collect();
            comps.push((e.spin, e.weight * w, vec));
        }
    }
    Ok(comps)
}

/// Covariant phase measurement on the rotation register: spin readout
/// followed by the canonical phase POVM on the block.
pub struct CovariantSampler {
    sectors: Vec<CovariantSector>,
    cumulative: Vec<f64>,
}

struct CovariantSector {
    weight: f64,
    /// chi_d = Σ_i block[i, i+d] for d = 1..2J; chi_0 = 1.
    fourier: Vec<Complex64>,
    envelope: f64,
}

impl CovariantSampler {
    pub fn new(state: &BlockState) -> Self {
        let mut sectors = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for e in &state.entries {
            let dim = e.spin.dim();
            let fourier: Vec<Complex64> = (1..dim)
                .map(|d| (0..dim - d).map(|i| e.block.mat[(i, i + d)]).sum())
                .collect();
            let envelope =
                (1.0 + 2.0 * fourier.iter().map(|z| z.norm()).sum::<f64>()) / TAU;
            acc += e.weight;
            sectors.push(CovariantSector { weight: e.weight, fourier, envelope });
            cumulative.push(acc);
        }
        CovariantSampler { sectors, cumulative }
    }

    fn density(sector: &CovariantSector, tau: f64) -> f64 {
        let mut re = 0.0;
        for (d, chi) in sector.fourier.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, (d + 1) as f64 * tau);
            re += (chi * ph).re;
        }
        ((1.0 + 2.0 * re) / TAU).max(0.0)
    }

    /// One outcome in [0, 2pi); the covariant estimate of the phase.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = *self.cumulative.last().expect("state has sectors");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c < u).min(self.sectors.len() - 1);
        let sector = &self.sectors[idx];
        loop {
            let tau = rng.random::<f64>() * TAU;
            if rng.random::<f64>() * sector.envelope <= Self::density(sector, tau) {
                return tau;
            }
        }
    }

    /// Exact outcome density Σ_J q_J f_J(tau) (used by tests and quadrature).
    pub fn outcome_density(&self, tau: f64) -> f64 {
        self.sectors.iter().map(|s| s.weight * Self::density(s, tau)).sum()
    }
}

/// Independent covariant qubit measurements on the embedded n-qubit state.
pub struct LocalPovmSampler {
    n: u32,
    components: Vec<LocalComponent>,
    cumulative: Vec<f64>,
    tables: Vec<(Spin, PathTable)>,
}

struct LocalComponent {
    spin: Spin,
    coeffs: Vec<Complex64>,
}

/// Dense amplitudes cap: 2^n complex entries per shot.
pub const MAX_LOCAL_QUBITS: u32 = 24;

impl LocalPovmSampler {
    pub fn new(state: &BlockState, t: f64) -> Result<Self> {
        if state.n > MAX_LOCAL_QUBITS {
            return Err(invalid(format!(
                "local measurement sampler supports up to {MAX_LOCAL_QUBITS} qubits, got {}",
                state.n
            )));
        }
        let comps = block_eigencomponents(state, t)?;
        let mut components = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (spin, w, coeffs) in comps {
            acc += w;
            components.push(LocalComponent { spin, coeffs });
            cumulative.push(acc);
        }
        let mut tables = Vec::new();
        for e in &state.entries {
            tables.push((e.spin, PathTable::new(state.n, e.spin)?));
        }
        Ok(LocalPovmSampler { n: state.n, components, cumulative, tables })
    }

    /// One shot: n outcome angles.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let total = *self.cumulative.last().expect("state has components");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c < u).min(self.components.len() - 1);
        let comp = &self.components[idx];
        let table = &self
            .tables
            .iter()
            .find(|(sp, _)| *sp == comp.spin)
            .expect("table built per sector")
            .1;
        let path = table.sample_path(rng);
        let basis = path_basis(&path);
        let dim = 1usize << self.n;
        let mut psi = vec![Complex64::ZERO; dim];
        for (coef, bvec) in comp.coeffs.iter().zip(basis.iter()) {
            if coef.norm_sqr() == 0.0 {
                continue;
            }
            for (x, amp) in bvec.iter().enumerate() {
                psi[x] += coef * amp;
            }
        }
        measure_all_qubits(&mut psi, self.n as usize, rng)
    }
}

/// Sequentially measure every qubit of a pure state with the covariant
/// qubit POVM, consuming the state vector.
pub fn measure_all_qubits<R: Rng + ?Sized>(
    psi: &mut Vec<Complex64>,
    n: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut outcomes = Vec::with_capacity(n);
    for step in 0..n {
        let half = 1usize << (n - 1 - step);
        // 2x2 reduced state of the leading qubit
        let mut r00 = 0.0;
        let mut r11 = 0.0;
        let mut r01 = Complex64::ZERO;
        for x in 0..half {
            let a = psi[x];
            let b = psi[x + half];
            r00 += a.norm_sqr();
            r11 += b.norm_sqr();
            r01 += a * b.conj();
        }
        let norm = r00 + r11;
        let nu = (2.0 * r01.norm() / norm).min(1.0);
        let phase = r01.arg();
        // density (1 + nu cos(tau - phase)) / 2pi
        let tau = loop {
            let cand = rng.random::<f64>() * TAU;
            if rng.random::<f64>() * (1.0 + nu) <= 1.0 + nu * (cand - phase).cos() {
                break cand;
            }
        };
        outcomes.push(tau);
        // contract <u_tau| on the measured qubit and renormalize
        let e = Complex64::from_polar(1.0, tau);
        let mut nrm = 0.0;
        for x in 0..half {
            let v = psi[x] + e * psi[x + half];
            nrm += v.norm_sqr();
            psi[x] = v;
        }
        psi.truncate(half);
        let scale = 1.0 / nrm.sqrt();
        for v in psi.iter_mut() {
            *v *= scale;
        }
    }
    outcomes
}

/// Exact joint outcome density of the local measurement, by full
/// contraction over all (sector, eigenvector, path) components. Exponential
/// in n; intended for cross-checks on small ensembles.
pub fn local_joint_density(state: &BlockState, t: f64, taus: &[f64]) -> Result<f64> {
    let n = state.n as usize;
    if taus.len() != n {
        return Err(invalid("need one outcome per qubit"));
    }
    let comps = block_eigencomponents(state, t)?;
    let mut density = 0.0;
    for (spin, w, coeffs) in comps {
        let table = PathTable::new(state.n, spin)?;
        let paths = table.all_paths();
        let m_j = paths.len() as f64;
        for path in paths {
            let basis = path_basis(&path);
            let mut psi = vec![Complex64::ZERO; 1 << n];
            for (coef, bvec) in coeffs.iter().zip(basis.iter()) {
                for (x, amp) in bvec.iter().enumerate() {
                    psi[x] += coef * amp;
                }
            }
            // contract <u_tau| qubit by qubit (highest bit first)
            let mut cur = psi;
            for (step, &tau) in taus.iter().rev().enumerate() {
                let half = 1usize << (n - 1 - step);
                let e = Complex64::from_polar(1.0, tau);
                let mut next = Vec::with_capacity(half);
                for x in 0..half {
                    next.push((cur[x] + e * cur[x + half]) / 2f64.sqrt());
                }
                cur = next;
            }
            let amp2 = cur[0].norm_sqr();
            density += w / m_j * amp2 / std::f64::consts::PI.powi(n as i32);
        }
    }
    Ok(density)
}
