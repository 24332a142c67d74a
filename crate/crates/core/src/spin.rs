//! Exact representation-theoretic machinery for i.i.d. qubit ensembles.
//!
//! An n-qubit permutation-invariant state decomposes into total-spin
//! sectors J = n/2, n/2-1, ..., (n mod 2)/2. Each sector carries a
//! (2J+1)-dimensional rotation block (indexed by the energy eigenbasis
//! |J,m>, m = J..-J) and a multiplicity register of dimension m_J that is
//! maximally mixed and carries no time information.
//!
//! Conventions used throughout the crate:
//! * |J,m> contains J+m excited qubits, so a time phase acts on block
//!   elements as (m,m') -> exp(-i (m-m') t).
//! * The dephased eigenbasis |J,m>_s is the symmetrization of J+m copies
//!   of sqrt(s)|0> + sqrt(1-s)|1> and J-m copies of its orthogonal
//!   complement; overlap tables are expressed against the symmetric
//!   computational basis |J,k> with J+k qubits in |0>.
//!
//! All binomial/multiplicity arithmetic runs in the log domain so that
//! ensembles of thousands of qubits stay representable.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linalg::{hermiticity_defect, min_eigenvalue, trace, CMat, RMat};
use crate::special::{ln_binomial, ln_sum_exp};

/// Total-spin quantum number, stored as 2J so that half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub fn from_doubled(two_j: u32) -> Self {
        Spin { two_j }
    }

    /// Parse a possibly half-integer J, rejecting negative or non-half-integer values.
    pub fn from_f64(j: f64) -> Result<Self> {
        if !j.is_finite() || j < 0.0 {
            return Err(invalid(format!("spin must be a nonnegative half-integer, got {j}")));
        }
        let two_j = 2.0 * j;
        if (two_j - two_j.round()).abs() > 1e-9 {
            return Err(invalid(format!("spin must be a half-integer, got {j}")));
        }
        Ok(Spin { two_j: two_j.round() as u32 })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Rotation-register dimension 2J+1.
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// Doubled m values in row order m = J, J-1, ..., -J.
    pub fn two_m_values(&self) -> impl Iterator<Item = i32> + '_ {
        let two_j = self.two_j as i32;
        (0..self.dim() as i32).map(move |i| two_j - 2 * i)
    }

    /// Row index of a doubled m value.
    pub fn index_of(&self, two_m: i32) -> Result<usize> {
        let two_j = self.two_j as i32;
        if two_m.abs() > two_j || (two_j - two_m) % 2 != 0 {
            return Err(invalid(format!("m = {}/2 outside sector J = {}/2", two_m, two_j)));
        }
        Ok(((two_j - two_m) / 2) as usize)
    }

    pub fn two_m_of_index(&self, i: usize) -> i32 {
        self.two_j as i32 - 2 * i as i32
    }
}

/// Spin sectors of an n-qubit ensemble, largest first.
pub fn spins_for_ensemble(n: u32) -> Vec<Spin> {
    let mut out = Vec::new();
    let mut two_j = n as i64;
    while two_j >= 0 {
        out.push(Spin::from_doubled(two_j as u32));
        two_j -= 2;
    }
    out
}

/// ln of the multiplicity m_J = C(n, n/2-J) (2J+1)/(n/2+J+1).
pub fn ln_multiplicity(n: u32, spin: Spin) -> f64 {
    let two_j = spin.two_j();
    assert!(two_j <= n && (n - two_j) % 2 == 0, "sector J = {}/2 invalid for n = {n}", two_j);
    let k = ((n - two_j) / 2) as i64;
    ln_binomial(n as u64, k) + ((two_j + 1) as f64).ln() - (((n + two_j) / 2 + 1) as f64).ln()
}

/// Exact multiplicity for moderate n; `None` on overflow.
pub fn multiplicity_exact(n: u32, spin: Spin) -> Option<u128> {
    let two_j = spin.two_j();
    if two_j > n || (n - two_j) % 2 != 0 {
        return None;
    }
    let k = (n - two_j) / 2;
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c.checked_mul(n as u128 - k as u128 + i)?;
        c /= i;
    }
    let num = c.checked_mul(two_j as u128 + 1)?;
    let den = ((n + two_j) / 2 + 1) as u128;
    if num % den != 0 {
        return None;
    }
    Some(num / den)
}

/// Wigner rotation matrix d^J(theta) = exp(-i theta J_y) in the basis
/// m = J..-J.
///
/// Computed from the spectral decomposition of the (tridiagonal,
/// antisymmetric) generator; direct factorial sums overflow once J
/// approaches 150, while this route stays stable for every J the crate
/// handles.
pub fn wigner_small_d(spin: Spin, theta: f64) -> RMat {
    let dim = spin.dim();
    if dim == 1 {
        return RMat::identity(1, 1);
    }
    let j = spin.j();
    // Ladder amplitudes between m_i and m_{i+1} = m_i - 1.
    let lambda: Vec<f64> = (0..dim - 1)
        .map(|i| {
            let m = j - i as f64;
            (j * (j + 1.0) - m * (m - 1.0)).sqrt()
        })
        .collect();
    // Real symmetric tridiagonal similarity transform of i * generator.
    let mut t = RMat::zeros(dim, dim);
    for i in 0..dim - 1 {
        t[(i, i + 1)] = -lambda[i] / 2.0;
        t[(i + 1, i)] = -lambda[i] / 2.0;
    }
    let se = t.symmetric_eigen();
    let q = &se.eigenvectors;
    let cosd = RMat::from_diagonal(&se.eigenvalues.map(|l| (theta * l).cos()));
    let sind = RMat::from_diagonal(&se.eigenvalues.map(|l| (theta * l).sin()));
    let c = q * cosd * q.transpose();
    let s = q * sind * q.transpose();
    RMat::from_fn(dim, dim, |r, k| match (k as i64 - r as i64).rem_euclid(4) {
        0 => c[(r, k)],
        1 => s[(r, k)],
        2 => -c[(r, k)],
        _ => -s[(r, k)],
    })
}

/// Overlaps O[m,k] = <J,m|_s | J,k> between the dephased eigenbasis at
/// amplitude parameter `s` and the symmetric computational basis.
#[derive(Clone, Debug)]
pub struct OverlapTable {
    pub spin: Spin,
    pub s: f64,
    /// Rows m = J..-J (dephased basis), columns k = J..-J (symmetric basis,
    /// J+k qubits in |0>).
    pub mat: RMat,
}

impl OverlapTable {
    pub fn value(&self, two_m: i32, two_k: i32) -> Result<f64> {
        let r = self.spin.index_of(two_m)?;
        let c = self.spin.index_of(two_k)?;
        Ok(self.mat[(r, c)])
    }
}

fn check_amplitude_param(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("amplitude parameter s must lie in (0,1), got {s}")));
    }
    Ok(())
}

/// Rotation angle realizing the basis change: cos^2(theta/2) = s.
fn basis_angle(s: f64) -> f64 {
    2.0 * s.sqrt().min(1.0).acos()
}

/// Build the full overlap table for one sector.
pub fn overlap_table(spin: Spin, s: f64) -> Result<OverlapTable> {
    check_amplitude_param(s)?;
    let d = wigner_small_d(spin, basis_angle(s));
    let dim = spin.dim();
    // Column k picks up (-1)^(J-k): the |1> component of the orthogonal
    // single-qubit vector carries a minus sign relative to a pure rotation.
    let mat = RMat::from_fn(dim, dim, |r, c| if c % 2 == 0 { d[(r, c)] } else { -d[(r, c)] });
    Ok(OverlapTable { spin, s, mat })
}

/// Single overlap <J,m|_s |J,k>.
pub fn symmetric_overlap(spin: Spin, two_m: i32, two_k: i32, s: f64) -> Result<f64> {
    overlap_table(spin, s)?.value(two_m, two_k)
}

/// Analytic envelope on |<J,m|_s |J,k>| (binomial product bound, with
/// separate branches for s >= 1/2 and s < 1/2).
pub fn symmetric_overlap_bound(spin: Spin, two_m: i32, two_k: i32, s: f64) -> Result<f64> {
    check_amplitude_param(s)?;
    spin.index_of(two_m)?;
    spin.index_of(two_k)?;
    let two_j = spin.two_j() as i64;
    let jk = (two_j + two_k as i64) / 2; // J + k
    let jm = (two_j - two_m as i64) / 2; // J - m
    let m = two_m as f64 / 2.0;
    let k = two_k as f64 / 2.0;
    let j2 = two_j as f64;
    let ln_bound = if s >= 0.5 {
        0.5 * (ln_binomial(two_j as u64, jk)
            + ln_binomial(two_j as u64, jm)
            + (j2 + k - m) * s.ln()
            + (m - k) * (1.0 - s).ln())
    } else {
        0.5 * (ln_binomial(two_j as u64, jk)
            + ln_binomial(two_j as u64, jm)
            + (m + k) * s.ln()
            + (j2 - m - k) * (1.0 - s).ln())
    };
    Ok(ln_bound.exp())
}

fn check_eigenvalue_param(p: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid(format!(
            "eigenvalue p must lie in [1/2, 1] (use p <-> 1-p symmetry upstream), got {p}"
        )));
    }
    Ok(())
}

/// Sector weights q_J of an n-fold product state with single-qubit
/// eigenvalues (p, 1-p); exact multiplicity-times-geometric-sum form,
/// evaluated in the log domain. Sectors in the order of
/// [`spins_for_ensemble`].
pub fn schur_weights(n: u32, p: f64) -> Result<Vec<(Spin, f64)>> {
    if n < 1 {
        return Err(invalid("ensemble size must be at least 1"));
    }
    check_eigenvalue_param(p)?;
    let spins = spins_for_ensemble(n);
    if p == 1.0 {
        return Ok(spins
            .into_iter()
            .map(|sp| (sp, if sp.two_j() == n { 1.0 } else { 0.0 }))
            .collect());
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let half_n = n as f64 / 2.0;
    Ok(spins
        .into_iter()
        .map(|sp| {
            // ln Σ_{μ=-J..J} p^(n/2+μ) (1-p)^(n/2-μ)
            let ln_geom = ln_sum_exp(sp.two_m_values().map(|two_mu| {
                let mu = two_mu as f64 / 2.0;
                (half_n + mu) * lp + (half_n - mu) * lq
            }));
            let ln_q = ln_multiplicity(n, sp) + ln_geom;
            (sp, ln_q.exp())
        })
        .collect())
}

/// The Gaussian-difference closed form of the sector weights,
/// q_J = (2J+1)/(2 J0) [B(n/2+J+1) - B(n/2-J)] with B the n-trial binomial
/// pmf and J0 = (p-1/2)(n+1).
///
/// Its index convention fails degenerate spot checks (it does not even
/// normalize at p = 1), so it serves only as an asymptotic cross-check of
/// [`schur_weights`] in the high-probability region; the exact form is
/// authoritative.
pub fn schur_weights_closed_form(n: u32, p: f64) -> Result<Vec<(Spin, f64)>> {
    if n < 1 {
        return Err(invalid("ensemble size must be at least 1"));
    }
    check_eigenvalue_param(p)?;
    let j0 = (p - 0.5) * (n as f64 + 1.0);
    let pmf = |k: i64| -> f64 {
        if k < 0 || k > n as i64 {
            return 0.0;
        }
        let lnb = ln_binomial(n as u64, k)
            + k as f64 * p.ln()
            + (n as i64 - k) as f64 * if p == 1.0 { 0.0 } else { (1.0 - p).ln() };
        if p == 1.0 && k < n as i64 {
            0.0
        } else {
            lnb.exp()
        }
    };
    Ok(spins_for_ensemble(n)
        .into_iter()
        .map(|sp| {
            let two_j = sp.two_j() as i64;
            let upper = (n as i64 + two_j) / 2 + 1; // n/2 + J + 1
            let lower = (n as i64 - two_j) / 2; // n/2 - J
            let q = (two_j as f64 + 1.0) / (2.0 * j0) * (pmf(upper) - pmf(lower));
            (sp, q)
        })
        .collect())
}

/// One rotation-register block.
#[derive(Clone, Debug)]
pub struct SpinBlock {
    pub spin: Spin,
    /// (2J+1) x (2J+1), rows/cols m = J..-J.
    pub mat: CMat,
}

impl SpinBlock {
    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }

    /// Check Hermiticity (1e-12), unit trace (1e-12) and positivity
    /// (min eigenvalue >= -1e-10).
    pub fn validate(&self) -> Result<()> {
        let h = hermiticity_defect(&self.mat);
        if h > 1e-12 {
            return Err(invalid(format!("block not Hermitian: defect {h:.3e}")));
        }
        let t = self.trace();
        if (t - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("block trace {t} differs from 1")));
        }
        let lmin = min_eigenvalue(&self.mat);
        if lmin < -1e-10 {
            return Err(invalid(format!("block not PSD: min eigenvalue {lmin:.3e}")));
        }
        Ok(())
    }
}

/// Block-diagonal density operator of an n-qubit exchangeable ensemble.
/// Sectors with exactly zero weight are omitted.
#[derive(Clone, Debug)]
pub struct BlockState {
    pub n: u32,
    pub entries: Vec<BlockEntry>,
}

#[derive(Clone, Debug)]
pub struct BlockEntry {
    pub spin: Spin,
    /// Sector probability q_J.
    pub weight: f64,
    /// Normalized rotation-register block.
    pub block: SpinBlock,
    /// ln of the multiplicity dimension m_J.
    pub ln_mult: f64,
}

impl BlockState {
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    pub fn entry(&self, spin: Spin) -> Option<&BlockEntry> {
        self.entries.iter().find(|e| e.spin == spin)
    }

    /// Σ q_J = 1 (1e-12) and per-block density-operator checks.
    pub fn validate(&self) -> Result<()> {
        let tw = self.total_weight();
        if (tw - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("sector weights sum to {tw}, not 1")));
        }
        for e in &self.entries {
            if e.weight < 0.0 {
                return Err(invalid(format!("negative sector weight {}", e.weight)));
            }
            e.block.validate()?;
        }
        Ok(())
    }
}

/// Normalized eigenweights p^(J+mu)(1-p)^(J-mu)/N_J of one block, in the
/// dephased basis, ordered mu = J..-J.
pub fn block_eigenweights(spin: Spin, p: f64) -> Vec<f64> {
    let dim = spin.dim();
    if p == 1.0 {
        let mut w = vec![0.0; dim];
        w[0] = 1.0;
        return w;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let two_j = spin.two_j() as f64;
    let ln_w: Vec<f64> = (0..dim)
        .map(|i| {
            let jp = two_j - i as f64; // J + mu
            let jm = i as f64; // J - mu
            jp * lp + jm * lq
        })
        .collect();
    let ln_n = ln_sum_exp(ln_w.iter().cloned());
    ln_w.into_iter().map(|l| (l - ln_n).exp()).collect()
}

/// Assemble one block from its overlap table, dephased eigenweights and a
/// time phase: energy-basis matrix elements carry exp(-i (m-m') t).
pub fn block_from_overlaps(table: &OverlapTable, weights: &[f64], t: f64) -> SpinBlock {
    let dim = table.spin.dim();
    assert_eq!(weights.len(), dim);
    // M[mu, i] = O[mu, -m_i]: flip the symmetric-basis column order, since
    // column k of the table counts |0> occupation while block rows count
    // excitation.
    let m = RMat::from_fn(dim, dim, |r, c| table.mat[(r, dim - 1 - c)]);
    let mut w_m = m.clone();
    for (r, &w) in weights.iter().enumerate() {
        for c in 0..dim {
            w_m[(r, c)] *= w;
        }
    }
    let real = m.transpose() * w_m;
    let mat = CMat::from_fn(dim, dim, |i, ip| {
        let phase = Complex64::from_polar(1.0, t * (i as f64 - ip as f64));
        phase * real[(i, ip)]
    });
    SpinBlock { spin: table.spin, mat }
}

/// Maximum ensemble size for dense block construction.
pub const MAX_BLOCK_QUBITS: u32 = 4096;

/// Full block-diagonal state of n i.i.d. clock qubits with eigenvalue p,
/// time t and amplitude parameter s.
pub fn block_state(n: u32, t: f64, p: f64, s: f64) -> Result<BlockState> {
    if n < 1 || n > MAX_BLOCK_QUBITS {
        return Err(invalid(format!("ensemble size {n} outside 1..={MAX_BLOCK_QUBITS}")));
    }
    check_eigenvalue_param(p)?;
    check_amplitude_param(s)?;
    let weights = schur_weights(n, p)?;
    let mut entries = Vec::new();
    for (spin, q) in weights {
        if q == 0.0 {
            continue;
        }
        let table = overlap_table(spin, s)?;
        let w = block_eigenweights(spin, p);
        let block = block_from_overlaps(&table, &w, t);
        entries.push(BlockEntry { spin, weight: q, block, ln_mult: ln_multiplicity(n, spin) });
    }
    Ok(BlockState { n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spin_parsing_rejects_bad_values() {
        assert!(Spin::from_f64(-0.5).is_err());
        assert!(Spin::from_f64(0.3).is_err());
        assert_eq!(Spin::from_f64(1.5).unwrap().two_j(), 3);
    }

    #[test]
    fn wigner_d_identity_at_zero_angle() {
        for two_j in [1u32, 2, 3, 7] {
            let d = wigner_small_d(Spin::from_doubled(two_j), 0.0);
            let dim = two_j as usize + 1;
            let defect = (&d - RMat::identity(dim, dim)).abs().max();
            assert!(defect < 1e-12, "J={}/2: defect {defect:.2e}", two_j);
        }
    }

    #[test]
    fn wigner_d_half_at_quarter_turn() {
        let d = wigner_small_d(Spin::from_doubled(1), std::f64::consts::FRAC_PI_2);
        let r = 0.5f64.sqrt();
        for v in d.iter() {
            assert_abs_diff_eq!(v.abs(), r, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(d[(0, 0)], r, epsilon = 1e-12);
        assert_abs_diff_eq!(d[(0, 1)], -r, epsilon = 1e-12);
    }

    #[test]
    fn wigner_d_spin_one_closed_form() {
        let th = 0.83_f64;
        let d = wigner_small_d(Spin::from_doubled(2), th);
        let (c, s) = (th.cos(), th.sin());
        let r2 = 0.5f64.sqrt();
        let expect = [
            [(1.0 + c) / 2.0, -s * r2, (1.0 - c) / 2.0],
            [s * r2, c, -s * r2],
            [(1.0 - c) / 2.0, s * r2, (1.0 + c) / 2.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(d[(i, j)], expect[i][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn wigner_d_is_special_orthogonal() {
        // J = 3, theta = 1.1: orthogonal with unit determinant.
        let d = wigner_small_d(Spin::from_doubled(6), 1.1);
        let gram = d.transpose() * &d;
        let defect = (&gram - RMat::identity(7, 7)).abs().max();
        assert!(defect < 1e-12, "orthogonality defect {defect:.2e}");
        assert_abs_diff_eq!(d.determinant(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn wigner_d_inverse_is_negative_angle() {
        for two_j in [1u32, 4, 9, 20] {
            let spin = Spin::from_doubled(two_j);
            for &th in &[0.3, 1.7, 2.9] {
                let prod = wigner_small_d(spin, th) * wigner_small_d(spin, -th);
                let dim = spin.dim();
                let defect = (&prod - RMat::identity(dim, dim)).abs().max();
                assert!(defect < 1e-11, "J={}/2 theta={th}: defect {defect:.2e}", two_j);
            }
        }
    }

    #[test]
    fn overlap_reduces_to_identity_as_s_tends_to_one() {
        let spin = Spin::from_doubled(1);
        let v = symmetric_overlap(spin, 1, 1, 1.0 - 1e-12).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn overlap_vanishes_at_center_for_spin_one() {
        // Explicit 3-dim symmetrized inner product gives 0 at s = 1/2.
        let v = symmetric_overlap(Spin::from_doubled(2), 0, 0, 0.5).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn overlap_table_is_orthogonal() {
        for two_j in [1u32, 2, 5, 8] {
            for &s in &[0.3, 0.5, 0.7, 0.9] {
                let t = overlap_table(Spin::from_doubled(two_j), s).unwrap();
                let dim = t.spin.dim();
                let gram = t.mat.transpose() * &t.mat;
                let defect = (&gram - RMat::identity(dim, dim)).abs().max();
                assert!(defect < 1e-10, "J={}/2 s={s}: defect {defect:.2e}", two_j);
            }
        }
    }

    /// Brute-force oracle: amplitudes of the symmetrized product vector on
    /// computational bitstrings, summed over subsets.
    fn symmetrized_vector_oracle(two_j: u32, two_m: i32, s: f64) -> Vec<f64> {
        let nq = two_j as usize;
        let n_up = ((two_j as i32 + two_m) / 2) as usize; // copies of phi_0
        let phi0 = [s.sqrt(), (1.0 - s).sqrt()];
        let phi_perp = [(1.0 - s).sqrt(), -s.sqrt()];
        let mut amp = vec![0.0f64; 1 << nq];
        // iterate over subsets holding phi_0
        for subset in 0..(1u32 << nq) {
            if subset.count_ones() as usize != n_up {
                continue;
            }
            for b in 0..(1usize << nq) {
                let mut a = 1.0;
                for q in 0..nq {
                    let bit = (b >> q) & 1;
                    a *= if (subset >> q) & 1 == 1 { phi0[bit] } else { phi_perp[bit] };
                }
                amp[b] += a;
            }
        }
        let norm: f64 = amp.iter().map(|a| a * a).sum::<f64>().sqrt();
        amp.iter().map(|a| a / norm).collect()
    }

    #[test]
    fn overlaps_match_symmetrized_vector_bruteforce() {
        // |J,k> amplitudes: uniform over strings with J-k ones.
        for two_j in [1u32, 2, 3, 4] {
            for &s in &[0.3, 0.5, 0.7, 0.9] {
                let spin = Spin::from_doubled(two_j);
                let table = overlap_table(spin, s).unwrap();
                for two_m in spin.two_m_values().collect::<Vec<_>>() {
                    let vs = symmetrized_vector_oracle(two_j, two_m, s);
                    for two_k in spin.two_m_values().collect::<Vec<_>>() {
                        let ones = ((two_j as i32 - two_k) / 2) as u32;
                        let nq = two_j as usize;
                        let count = (0..(1usize << nq))
                            .filter(|b| (*b as u32).count_ones() == ones)
                            .count() as f64;
                        let inner: f64 = (0..(1usize << nq))
                            .filter(|b| (*b as u32).count_ones() == ones)
                            .map(|b| vs[b] / count.sqrt())
                            .sum();
                        let got = table.value(two_m, two_k).unwrap();
                        assert_abs_diff_eq!(got, inner, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn overlaps_respect_analytic_envelope() {
        for two_j in (1u32..=16).collect::<Vec<_>>() {
            for &s in &[0.3, 0.5, 0.7, 0.9] {
                let spin = Spin::from_doubled(two_j);
                let table = overlap_table(spin, s).unwrap();
                for two_m in spin.two_m_values().collect::<Vec<_>>() {
                    for two_k in spin.two_m_values().collect::<Vec<_>>() {
                        let v = table.value(two_m, two_k).unwrap().abs();
                        let b = symmetric_overlap_bound(spin, two_m, two_k, s).unwrap();
                        assert!(
                            v <= b + 1e-12,
                            "J={}/2 m={}/2 k={}/2 s={s}: |{v:.3e}| > bound {b:.3e}",
                            two_j,
                            two_m,
                            two_k
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn schur_weights_pure_state_lives_in_top_sector() {
        let w = schur_weights(4, 1.0).unwrap();
        assert_eq!(w[0].0.two_j(), 4);
        assert_abs_diff_eq!(w[0].1, 1.0, epsilon = 1e-15);
        for (_, q) in &w[1..] {
            assert_eq!(*q, 0.0);
        }
    }

    #[test]
    fn schur_weights_two_qubits() {
        // Brute-force Schur of rho^{x2}: q_1 = p^2 + p(1-p) + (1-p)^2, q_0 = p(1-p).
        let p = 0.8;
        let w = schur_weights(2, p).unwrap();
        assert_abs_diff_eq!(w[0].1, 0.84, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1].1, 0.16, epsilon = 1e-14);
    }

    #[test]
    fn schur_weights_concentrate_near_mode() {
        let (n, p) = (100u32, 0.75);
        let w = schur_weights(n, p).unwrap();
        let (best, _) = w
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(s, q)| (s.j(), q))
            .unwrap();
        let j0 = (p - 0.5) * (n as f64 + 1.0);
        assert!((best - j0).abs() <= (n as f64).sqrt(), "argmax {best} vs J0 {j0}");
    }

    #[test]
    fn schur_weights_normalize_up_to_large_n() {
        for &(n, p) in &[(200u32, 0.6), (1001, 0.9), (2000, 0.75)] {
            let w = schur_weights(n, p).unwrap();
            let sum: f64 = w.iter().map(|(_, q)| q).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn closed_form_weights_agree_asymptotically() {
        // Relative agreement of order 1/sqrt(n) in the high-probability
        // window; the closed form is not exact (and is degenerate at p=1).
        for &(n, p) in &[(400u32, 0.75), (1600, 0.9)] {
            let exact = schur_weights(n, p).unwrap();
            let cf = schur_weights_closed_form(n, p).unwrap();
            let j0 = (p - 0.5) * (n as f64 + 1.0);
            let sn = (n as f64).sqrt();
            let tol = 8.0 / ((1.0 - p) * sn);
            for ((sp, q), (_, qcf)) in exact.iter().zip(cf.iter()) {
                if (sp.j() - j0).abs() <= sn {
                    let rel = (qcf / q - 1.0).abs();
                    assert!(
                        rel <= tol,
                        "n={n} p={p} J={}: closed form off by {rel:.3e} (tol {tol:.3e})",
                        sp.j()
                    );
                }
            }
        }
    }

    #[test]
    fn multiplicities_are_integers() {
        for n in 1u32..=40 {
            for spin in spins_for_ensemble(n) {
                let exact = multiplicity_exact(n, spin)
                    .unwrap_or_else(|| panic!("n={n} J={}/2 not integral", spin.two_j()));
                assert!(exact >= 1);
                assert_abs_diff_eq!(
                    ln_multiplicity(n, spin),
                    (exact as f64).ln(),
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn multiplicities_sum_to_hilbert_dimension() {
        for n in 1u32..=20 {
            let total: u128 = spins_for_ensemble(n)
                .into_iter()
                .map(|sp| multiplicity_exact(n, sp).unwrap() * sp.dim() as u128)
                .sum();
            assert_eq!(total, 1u128 << n);
        }
    }

    #[test]
    fn single_qubit_block_state_matches_direct_density_matrix() {
        let (t, p) = (0.9, 0.77);
        let st = block_state(1, t, p, 0.5).unwrap();
        assert_eq!(st.entries.len(), 1);
        let b = &st.entries[0].block.mat;
        // row 0 is the excited level: diagonal 1/2, coherence (p-1/2)e^{-it}
        assert_abs_diff_eq!(b[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(b[(1, 1)].re, 0.5, epsilon = 1e-14);
        let c = b[(0, 1)];
        assert_abs_diff_eq!(c.re, (p - 0.5) * t.cos(), epsilon = 1e-13);
        assert_abs_diff_eq!(c.im, -(p - 0.5) * t.sin(), epsilon = 1e-13);
    }

    #[test]
    fn pure_top_block_has_binomial_amplitudes() {
        // n = 16, T = 0, p = 1: the single J = 8 block is the pure state
        // with amplitudes sqrt(B_{k,16,1/2}).
        let st = block_state(16, 0.0, 1.0, 0.5).unwrap();
        assert_eq!(st.entries.len(), 1);
        let e = &st.entries[0];
        assert_eq!(e.spin.two_j(), 16);
        assert_abs_diff_eq!(e.weight, 1.0, epsilon = 1e-14);
        for (i, two_m) in e.spin.two_m_values().enumerate() {
            let k = ((16 + two_m) / 2) as i64; // excitation count
            let want = (ln_binomial(16, k) - 16.0 * 2f64.ln()).exp();
            assert_abs_diff_eq!(e.block.mat[(i, i)].re, want, epsilon = 1e-12);
        }
        // purity 1
        assert_abs_diff_eq!(crate::linalg::purity(&e.block.mat), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn block_state_entries_are_valid_density_operators() {
        for &(n, p, t) in &[(3u32, 0.9, 0.7), (6, 0.6, 2.1), (9, 0.75, 4.4)] {
            let st = block_state(n, t, p, 0.5).unwrap();
            st.validate().unwrap();
        }
    }

    #[test]
    fn block_state_phases_have_prescribed_sign() {
        // (m, m') element carries exp(-i(m-m')t).
        let t = 0.6;
        let st0 = block_state(4, 0.0, 0.8, 0.5).unwrap();
        let st = block_state(4, t, 0.8, 0.5).unwrap();
        for (e0, e) in st0.entries.iter().zip(st.entries.iter()) {
            let dim = e.spin.dim();
            for i in 0..dim {
                for ip in 0..dim {
                    let dm = (e.spin.two_m_of_index(i) - e.spin.two_m_of_index(ip)) as f64 / 2.0;
                    let want = e0.block.mat[(i, ip)] * Complex64::from_polar(1.0, -dm * t);
                    let got = e.block.mat[(i, ip)];
                    assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-12);
                    assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn block_state_guards_arguments() {
        assert!(block_state(0, 0.0, 0.9, 0.5).is_err());
        assert!(block_state(4, 0.0, 0.3, 0.5).is_err());
        assert!(block_state(4, 0.0, 0.9, 1.0).is_err());
        assert!(block_state(MAX_BLOCK_QUBITS + 1, 0.0, 0.9, 0.5).is_err());
    }
}
