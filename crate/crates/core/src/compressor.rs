//! Frequency-projection compression of block-diagonal clock states.
//!
//! The encoder reads out the total spin J (non-disturbing, stored as a
//! classical label), discards the multiplicity register, and pinches the
//! rotation register onto a narrow band of energy levels around the mean.
//! Leaked weight is replaced by a fixed state on the kept window, so the
//! per-block channel is rho -> P rho P + (1 - Tr[P rho]) rho_0; it is
//! trace preserving and completely positive, and its error is independent
//! of the elapsed time because P commutes with the free evolution.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{fidelity, trace_norm_hermitian, CMat};
use crate::spin::{
    block_eigenweights, block_from_overlaps, ln_multiplicity, overlap_table, BlockEntry,
    BlockState, Spin, SpinBlock,
};

/// Which energy levels the encoder keeps per sector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum WindowPolicy {
    /// Band of half-width sqrt(J) log2(J) / 2 around the mean level
    /// (floored at half a level so tiny sectors keep their support).
    Asymptotic,
    /// Hard level-count budget: keep whole distance shells around the mean
    /// as long as at most 2^q levels are used.
    QubitBudget(u32),
}

impl std::fmt::Display for WindowPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WindowPolicy::Asymptotic => write!(f, "asymptotic"),
            WindowPolicy::QubitBudget(q) => write!(f, "qubit-budget={q}"),
        }
    }
}

/// Kept-level window of one sector.
#[derive(Clone, Debug)]
pub struct ProjectionWindow {
    pub spin: Spin,
    /// Mean level (in units of m) the band is centred on.
    pub center: f64,
    pub half_width: f64,
    /// Kept doubled-m values, ordered m = high..low like block rows.
    pub kept_two_m: Vec<i32>,
}

/// Window centre in m for amplitude parameter s; the excitation count of
/// the dephased mean level is (1-s) per qubit.
fn window_center(spin: Spin, s: f64) -> f64 {
    (1.0 - 2.0 * s) * spin.j()
}

impl ProjectionWindow {
    /// Asymptotic band window.
    pub fn asymptotic(spin: Spin, s: f64) -> Self {
        let j = spin.j();
        let c = window_center(spin, s);
        let h = if j > 0.0 { (j.sqrt() * j.log2() / 2.0).max(0.5) } else { 0.5 };
        let kept = spin
            .two_m_values()
            .filter(|&two_m| (two_m as f64 / 2.0 - c).abs() <= h + 1e-12)
            .collect();
        ProjectionWindow { spin, center: c, half_width: h, kept_two_m: kept }
    }

    /// Keep whole equal-distance shells while at most 2^q levels fit.
    pub fn qubit_budget(spin: Spin, s: f64, q: u32) -> Result<Self> {
        let c = window_center(spin, s);
        let budget = 1usize << q.min(31);
        let mut levels: Vec<(f64, i32)> = spin
            .two_m_values()
            .map(|two_m| ((two_m as f64 / 2.0 - c).abs(), two_m))
            .collect();
        levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut kept = Vec::new();
        let mut i = 0;
        while i < levels.len() {
            let mut j = i;
            while j < levels.len() && (levels[j].0 - levels[i].0).abs() < 1e-9 {
                j += 1;
            }
            if kept.len() + (j - i) > budget {
                break;
            }
            kept.extend(levels[i..j].iter().map(|&(_, m)| m));
            i = j;
        }
        if kept.is_empty() {
            return Err(Error::Config(format!(
                "qubit budget {q} cannot hold a single level shell of sector J = {}",
                spin.j()
            )));
        }
        kept.sort_unstable_by(|a, b| b.cmp(a));
        let h = kept
            .iter()
            .map(|&m| (m as f64 / 2.0 - c).abs())
            .fold(0.0f64, f64::max);
        Ok(ProjectionWindow { spin, center: c, half_width: h, kept_two_m: kept })
    }

    /// Explicit kept set (used to probe window conventions).
    pub fn from_kept(spin: Spin, mut kept_two_m: Vec<i32>) -> Result<Self> {
        if kept_two_m.is_empty() {
            return Err(invalid("window must keep at least one level"));
        }
        for &m in &kept_two_m {
            spin.index_of(m)?;
        }
        kept_two_m.sort_unstable_by(|a, b| b.cmp(a));
        kept_two_m.dedup();
        let c = kept_two_m.iter().map(|&m| m as f64 / 2.0).sum::<f64>() / kept_two_m.len() as f64;
        let h = kept_two_m
            .iter()
            .map(|&m| (m as f64 / 2.0 - c).abs())
            .fold(0.0f64, f64::max);
        Ok(ProjectionWindow { spin, center: c, half_width: h, kept_two_m })
    }

    pub fn for_policy(spin: Spin, s: f64, policy: WindowPolicy) -> Result<Self> {
        match policy {
            WindowPolicy::Asymptotic => Ok(Self::asymptotic(spin, s)),
            WindowPolicy::QubitBudget(q) => Self::qubit_budget(spin, s, q),
        }
    }

    pub fn len(&self) -> usize {
        self.kept_two_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept_two_m.is_empty()
    }

    /// Memory qubits needed for the kept window.
    pub fn memory_qubits(&self) -> u32 {
        (self.len() as f64).log2().ceil().max(0.0) as u32
    }

    fn kept_indices(&self) -> Vec<usize> {
        self.kept_two_m
            .iter()
            .map(|&m| self.spin.index_of(m).expect("validated on construction"))
            .collect()
    }
}

/// Compressor output for one sector: the channel-form state on the kept
/// window plus the classical spin label.
#[derive(Clone, Debug)]
pub struct MemoryRecord {
    pub spin: Spin,
    pub kept_two_m: Vec<i32>,
    /// (P rho P + leak rho_0) restricted to the window; trace 1.
    pub kept_block: CMat,
    /// 1 - Tr[P rho].
    pub leakage: f64,
    pub memory_qubits: u32,
}

/// Apply the projection channel to one block. Returns the record and the
/// channel output expressed back in the full (2J+1)-dimensional basis.
pub fn frequency_project(block: &SpinBlock, window: &ProjectionWindow) -> (MemoryRecord, SpinBlock) {
    assert_eq!(block.spin, window.spin, "window built for a different sector");
    let idx = window.kept_indices();
    let w = idx.len();
    let leak_fill = Complex64::new(1.0, 0.0) / w as f64;
    let mut kept = CMat::zeros(w, w);
    for (a, &ia) in idx.iter().enumerate() {
        for (b, &ib) in idx.iter().enumerate() {
            kept[(a, b)] = block.mat[(ia, ib)];
        }
    }
    let kept_weight: f64 = (0..w).map(|a| kept[(a, a)].re).sum();
    let leakage = (1.0 - kept_weight).max(0.0);
    for a in 0..w {
        kept[(a, a)] += leak_fill * leakage;
    }
    let dim = block.spin.dim();
    let mut full = CMat::zeros(dim, dim);
    for (a, &ia) in idx.iter().enumerate() {
        for (b, &ib) in idx.iter().enumerate() {
            full[(ia, ib)] = kept[(a, b)];
        }
    }
    (
        MemoryRecord {
            spin: block.spin,
            kept_two_m: window.kept_two_m.clone(),
            kept_block: kept,
            leakage,
            memory_qubits: window.memory_qubits(),
        },
        SpinBlock { spin: block.spin, mat: full },
    )
}

/// Distribution over memory records produced by the encoder.
#[derive(Clone, Debug)]
pub struct EncodedState {
    pub n: u32,
    pub s: f64,
    pub policy: WindowPolicy,
    /// (sector weight q_J, record) pairs.
    pub records: Vec<(f64, MemoryRecord)>,
    /// Classical bits labelling the measured J outcome.
    pub spin_label_bits: u32,
}

/// High-probability cutoff for the reported memory peak.
const HIGH_PROB_CUTOFF: f64 = 1e-9;

impl EncodedState {
    /// Largest window cost among sectors that actually occur.
    pub fn memory_qubits_peak(&self) -> u32 {
        self.records
            .iter()
            .filter(|(q, _)| *q > HIGH_PROB_CUTOFF)
            .map(|(_, r)| r.memory_qubits)
            .max()
            .unwrap_or(0)
    }

    /// Window-qubit peak plus the classical spin-label cost.
    pub fn total_cost_qubits(&self) -> u32 {
        self.memory_qubits_peak() + self.spin_label_bits
    }

    /// Weighted projection leakage Σ q_J leak_J.
    pub fn expected_leakage(&self) -> f64 {
        self.records.iter().map(|(q, r)| q * r.leakage).sum()
    }
}

/// Encode a block state: one record per occupied sector.
pub fn encode(state: &BlockState, s: f64, policy: WindowPolicy) -> Result<EncodedState> {
    let mut records = Vec::with_capacity(state.entries.len());
    for e in &state.entries {
        let window = ProjectionWindow::for_policy(e.spin, s, policy)?;
        let (rec, _) = frequency_project(&e.block, &window);
        records.push((e.weight, rec));
    }
    let sectors = state.n / 2 + 1;
    Ok(EncodedState {
        n: state.n,
        s,
        policy,
        records,
        spin_label_bits: (sectors as f64).log2().ceil() as u32,
    })
}

fn embed_record(rec: &MemoryRecord, postselect: bool) -> Result<SpinBlock> {
    let dim = rec.spin.dim();
    let w = rec.kept_two_m.len();
    let mut mat = CMat::zeros(dim, dim);
    let renorm = if postselect {
        let kept_weight = 1.0 - rec.leakage;
        if kept_weight <= 0.0 {
            return Err(invalid("cannot post-select a fully leaked record"));
        }
        kept_weight
    } else {
        1.0
    };
    let leak_fill = rec.leakage / w as f64;
    for (a, &ma) in rec.kept_two_m.iter().enumerate() {
        for (b, &mb) in rec.kept_two_m.iter().enumerate() {
            let ia = rec.spin.index_of(ma)?;
            let ib = rec.spin.index_of(mb)?;
            let mut v = rec.kept_block[(a, b)];
            if postselect && a == b {
                v -= Complex64::new(leak_fill, 0.0);
            }
            mat[(ia, ib)] = v / renorm;
        }
    }
    Ok(SpinBlock { spin: rec.spin, mat })
}

fn decode_with(encoded: &EncodedState, n: u32, postselect: bool) -> Result<BlockState> {
    if n != encoded.n {
        return Err(invalid(format!(
            "decode for n = {n} given records produced from n = {}",
            encoded.n
        )));
    }
    let entries = encoded
        .records
        .iter()
        .map(|(q, rec)| {
            Ok(BlockEntry {
                spin: rec.spin,
                weight: *q,
                block: embed_record(rec, postselect)?,
                ln_mult: ln_multiplicity(n, rec.spin),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockState { n, entries })
}

/// Reassemble the block state Σ q_J |J><J| (x) channel(rho_J) (x) I/m_J.
pub fn decode(encoded: &EncodedState, n: u32) -> Result<BlockState> {
    decode_with(encoded, n, false)
}

/// Decode conditioned on no leakage: each kept block is renormalized with
/// the replacement term removed. This is the reading under which the pure
/// clock's infidelity equals its leakage.
pub fn decode_postselected(encoded: &EncodedState, n: u32) -> Result<BlockState> {
    decode_with(encoded, n, true)
}

/// Trace-norm and fidelity metrics between two block states, exploiting
/// block-diagonality: the multiplicity registers are identical and drop out.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorMetrics {
    /// (1/2) ‖a - b‖₁.
    pub eps_trace: f64,
    /// 1 - F(a, b)².
    pub infidelity: f64,
}

pub fn compression_error(a: &BlockState, b: &BlockState) -> Result<ErrorMetrics> {
    if a.n != b.n {
        return Err(invalid("states describe different ensemble sizes"));
    }
    let spins: Vec<Spin> = {
        let mut v: Vec<Spin> = a
            .entries
            .iter()
            .map(|e| e.spin)
            .chain(b.entries.iter().map(|e| e.spin))
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let mut eps = 0.0;
    let mut fid = 0.0;
    for spin in spins {
        let ea = a.entry(spin);
        let eb = b.entry(spin);
        match (ea, eb) {
            (Some(ea), Some(eb)) => {
                let da = &ea.block.mat * Complex64::new(ea.weight, 0.0);
                let db = &eb.block.mat * Complex64::new(eb.weight, 0.0);
                eps += 0.5 * trace_norm_hermitian(&(da - db));
                fid += (ea.weight * eb.weight).sqrt() * fidelity(&ea.block.mat, &eb.block.mat);
            }
            (Some(e), None) | (None, Some(e)) => eps += 0.5 * e.weight,
            (None, None) => {}
        }
    }
    Ok(ErrorMetrics { eps_trace: eps, infidelity: 1.0 - fid * fid })
}

/// Full pre-asymptotic projection-error bound for one sector:
/// (3/2) sqrt(exp[-ln²J/(4 ln²2) + a ln(2J) + a ln(s/(1-s))] + ((1-p)/p)^(a+1))
/// with a = floor(ln J / 4). Vacuous (+inf) at p = 1/2.
pub fn projection_error_bound(spin: Spin, p: f64, s: f64) -> Result<f64> {
    let j = spin.j();
    if j < 2.0 {
        return Err(invalid(format!("bound requires J >= 2, got {j}")));
    }
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid(format!("eigenvalue p = {p} outside [1/2, 1]")));
    }
    if p == 0.5 {
        return Ok(f64::INFINITY);
    }
    let a = (j.ln() / 4.0).floor();
    let ln2 = std::f64::consts::LN_2;
    let term1 =
        (-j.ln().powi(2) / (4.0 * ln2 * ln2) + a * (2.0 * j).ln() + a * (s / (1.0 - s)).ln()).exp();
    let term2 = if p == 1.0 { 0.0 } else { ((1.0 - p) / p).powf(a + 1.0) };
    Ok(1.5 * (term1 + term2).sqrt())
}

/// Exact projection error of one sector under the asymptotic window,
/// evaluated at t = 0 (the error is phase independent).
pub fn projection_error_exact(spin: Spin, p: f64, s: f64) -> Result<f64> {
    let table = overlap_table(spin, s)?;
    let weights = block_eigenweights(spin, p);
    let block = block_from_overlaps(&table, &weights, 0.0);
    let window = ProjectionWindow::asymptotic(spin, s);
    let (_, projected) = frequency_project(&block, &window);
    Ok(0.5 * trace_norm_hermitian(&(projected.mat - block.mat)))
}

/// Leading-order bound on the accumulated storage error of k repeated
/// compressions under decay rate gamma over total duration t:
/// (3k/2) (2 e^{gamma t} / n)^{(1/8) ln coth(gamma t / 2)}.
/// At gamma t = 0 the exponent diverges and the pure-state sector bound is
/// used instead.
pub fn overall_error_bound(n: u32, k: u32, t: f64, gamma: f64) -> Result<f64> {
    if n < 2 || k < 1 {
        return Err(invalid("need n >= 2 and k >= 1"));
    }
    if gamma < 0.0 || t < 0.0 {
        return Err(invalid("gamma and t must be nonnegative"));
    }
    let gt = gamma * t;
    if gt == 0.0 {
        let top = Spin::from_doubled(n);
        return Ok(k as f64 * projection_error_bound(top, 1.0, 0.5)?);
    }
    let base = 2.0 * gt.exp() / n as f64;
    let exponent = (1.0 / (gt / 2.0).tanh()).ln() / 8.0;
    Ok(1.5 * k as f64 * base.powf(exponent))
}

/// Round-trip compression summary, serializable to the reporting schema.
#[derive(Clone, Debug, Serialize)]
pub struct CompressionReport {
    pub n: u32,
    pub p: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub window_policy: String,
    pub memory_qubits: u32,
    /// Channel-form round-trip trace distance.
    pub eps_trace: f64,
    /// 1 - F² against the post-selected reconstruction.
    pub infidelity: f64,
    pub bound_value: f64,
    pub bound_satisfied: bool,
}

/// Encode/decode round trip of the ensemble (n, t, p) under `policy`.
///
/// `eps_trace` uses the faithful channel decode; `infidelity` uses the
/// post-selected decode, the convention under which a pure clock's
/// infidelity equals its window leakage.
pub fn roundtrip_report(n: u32, t: f64, p: f64, policy: WindowPolicy) -> Result<CompressionReport> {
    let s = 0.5;
    let original = crate::spin::block_state(n, t, p, s)?;
    let encoded = encode(&original, s, policy)?;
    let channel = decode(&encoded, n)?;
    let postselected = decode_postselected(&encoded, n)?;
    let eps_trace = compression_error(&original, &channel)?.eps_trace;
    let infidelity = compression_error(&original, &postselected)?.infidelity;
    let gt = if p == 1.0 { 0.0 } else { -(2.0 * p - 1.0).ln() };
    let bound_value = overall_error_bound(n, 1, 1.0, gt)?;
    Ok(CompressionReport {
        n,
        p,
        t,
        window_policy: policy.to_string(),
        memory_qubits: encoded.memory_qubits_peak(),
        eps_trace,
        infidelity,
        bound_value,
        bound_satisfied: eps_trace <= bound_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::block_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn asymptotic_window_small_sectors() {
        // J = 1/2 keeps both levels; J = 4 keeps m in {-2..2}.
        let w = ProjectionWindow::asymptotic(Spin::from_doubled(1), 0.5);
        assert_eq!(w.kept_two_m, vec![1, -1]);
        assert_eq!(w.memory_qubits(), 1);
        let w = ProjectionWindow::asymptotic(Spin::from_doubled(8), 0.5);
        assert_eq!(w.kept_two_m, vec![4, 2, 0, -2, -4]);
        assert_eq!(w.memory_qubits(), 3);
    }

    #[test]
    fn qubit_budget_keeps_whole_shells() {
        // 17 levels, budget 16: the outermost shell (both m = ±8) does not
        // fit, leaving the symmetric 15-level window.
        let w = ProjectionWindow::qubit_budget(Spin::from_doubled(16), 0.5, 4).unwrap();
        assert_eq!(w.len(), 15);
        assert_eq!(w.memory_qubits(), 4);
        // 5 levels, budget 4: keep the 3 central ones.
        let w = ProjectionWindow::qubit_budget(Spin::from_doubled(4), 0.5, 2).unwrap();
        assert_eq!(w.kept_two_m, vec![2, 0, -2]);
    }

    #[test]
    fn projection_is_identity_when_support_fits() {
        let st = block_state(4, 0.7, 0.9, 0.5).unwrap();
        let e = st.entry(Spin::from_doubled(4)).unwrap();
        let window = ProjectionWindow::from_kept(e.spin, e.spin.two_m_values().collect()).unwrap();
        let (rec, out) = frequency_project(&e.block, &window);
        assert_abs_diff_eq!(rec.leakage, 0.0, epsilon = 1e-14);
        let defect = (&out.mat - &e.block.mat).map(|z| z.norm()).max();
        assert!(defect < 1e-14);
    }

    #[test]
    fn pure_sixteen_qubit_leakage_matches_binomial_tail() {
        // J = 8, p = 1, window m in {-7..7}: leakage 2 * 2^-16, trace
        // distance ~ sqrt(leak (1-leak)).
        let st = block_state(16, 0.0, 1.0, 0.5).unwrap();
        let e = &st.entries[0];
        let kept: Vec<i32> = e.spin.two_m_values().filter(|m| m.abs() <= 14).collect();
        let window = ProjectionWindow::from_kept(e.spin, kept).unwrap();
        let (rec, out) = frequency_project(&e.block, &window);
        let leak = 2.0 * 2f64.powi(-16);
        assert_abs_diff_eq!(rec.leakage, leak, epsilon = 1e-12);
        let dist = 0.5 * trace_norm_hermitian(&(&out.mat - &e.block.mat));
        assert_abs_diff_eq!(dist, (leak * (1.0 - leak)).sqrt(), epsilon = 2e-5);
    }

    #[test]
    fn channel_output_is_valid_state() {
        for &(n, p, t) in &[(6u32, 0.8, 0.0), (9, 0.9, 1.3), (12, 0.6, 2.2)] {
            let st = block_state(n, t, p, 0.5).unwrap();
            for e in &st.entries {
                let window = ProjectionWindow::asymptotic(e.spin, 0.5);
                let (_, out) = frequency_project(&e.block, &window);
                out.validate()
                    .unwrap_or_else(|err| panic!("n={n} J={}: {err}", e.spin.j()));
            }
        }
    }

    #[test]
    fn single_qubit_encodes_losslessly() {
        let st = block_state(1, 0.4, 1.0, 0.5).unwrap();
        let enc = encode(&st, 0.5, WindowPolicy::Asymptotic).unwrap();
        assert_eq!(enc.records.len(), 1);
        let (_, rec) = &enc.records[0];
        assert_eq!(rec.spin.two_j(), 1);
        assert_eq!(rec.memory_qubits, 1);
        assert_abs_diff_eq!(rec.leakage, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn decode_inverts_lossless_encode() {
        let st = block_state(5, 1.1, 0.85, 0.5).unwrap();
        // windows wide enough to keep everything
        let enc = encode(&st, 0.5, WindowPolicy::QubitBudget(3)).unwrap();
        for (_, rec) in &enc.records {
            assert_abs_diff_eq!(rec.leakage, 0.0, epsilon = 1e-13);
        }
        let back = decode(&enc, 5).unwrap();
        let m = compression_error(&st, &back).unwrap();
        assert!(m.eps_trace < 1e-12, "eps = {}", m.eps_trace);
        assert!(m.infidelity < 1e-10, "infid = {}", m.infidelity);
    }

    #[test]
    fn decode_rejects_mismatched_ensemble_size() {
        let st = block_state(4, 0.0, 0.9, 0.5).unwrap();
        let enc = encode(&st, 0.5, WindowPolicy::Asymptotic).unwrap();
        assert!(decode(&enc, 6).is_err());
    }

    #[test]
    fn headline_sixteen_qubit_roundtrip() {
        // 16 clock qubits into 4 memory qubits: trace distance 5.5e-3,
        // post-selected infidelity 3.05e-5, independent of T.
        for &t in &[0.0, 1.3, 4.0] {
            let rep = roundtrip_report(16, t, 1.0, WindowPolicy::QubitBudget(4)).unwrap();
            assert_eq!(rep.memory_qubits, 4);
            assert!((rep.eps_trace - 5.5e-3).abs() / 5.5e-3 < 0.02, "eps {}", rep.eps_trace);
            assert!(
                (rep.infidelity - 3.05e-5).abs() / 3.05e-5 < 0.02,
                "infidelity {}",
                rep.infidelity
            );
        }
    }

    #[test]
    fn compression_error_of_identical_states_vanishes() {
        let st = block_state(6, 0.9, 0.8, 0.5).unwrap();
        let m = compression_error(&st, &st).unwrap();
        assert_abs_diff_eq!(m.eps_trace, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.infidelity, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn weighted_leakage_equals_total_projection_error_for_diagonal_loss() {
        // Σ q_J leak_J is the exact trace distance when each block's
        // off-window coherences vanish; in general it lower-bounds twice the
        // error. Here: compare against the exact metric for n = 20.
        let st = block_state(20, 0.6, 0.9, 0.5).unwrap();
        let enc = encode(&st, 0.5, WindowPolicy::Asymptotic).unwrap();
        let back = decode(&enc, 20).unwrap();
        let m = compression_error(&st, &back).unwrap();
        let lk = enc.expected_leakage();
        assert!(m.eps_trace >= lk / 2.0 - 1e-12);
        assert!(m.eps_trace <= 1.5 * lk.sqrt() + 1e-12);
    }

    #[test]
    fn projection_bound_dominates_exact_error_spot_checks() {
        for &(two_j, p) in &[(12u32, 0.9), (64, 0.8), (128, 0.99)] {
            let spin = Spin::from_doubled(two_j);
            let exact = projection_error_exact(spin, p, 0.5).unwrap();
            let bound = projection_error_bound(spin, p, 0.5).unwrap();
            assert!(exact <= bound, "J={} p={p}: exact {exact:.3e} > bound {bound:.3e}", spin.j());
        }
    }

    #[test]
    fn projection_bound_edge_cases() {
        let spin = Spin::from_doubled(64);
        assert_eq!(projection_error_bound(spin, 0.5, 0.5).unwrap(), f64::INFINITY);
        // p = 1: second term vanishes.
        let b = projection_error_bound(spin, 1.0, 0.5).unwrap();
        let j: f64 = 32.0;
        let a = (j.ln() / 4.0).floor();
        let ln2 = std::f64::consts::LN_2;
        let t1 = (-j.ln().powi(2) / (4.0 * ln2 * ln2) + a * (2.0 * j).ln()).exp();
        assert_abs_diff_eq!(b, 1.5 * t1.sqrt(), epsilon = 1e-12);
        assert!(projection_error_bound(Spin::from_doubled(2), 0.9, 0.5).is_err());
    }

    #[test]
    fn overall_bound_consistent_with_single_shot_form() {
        // k = 1, p = 0.9 (gamma t = ln(1/(2p-1))), n = 256 equals
        // (3/2) (2/((2p-1) n))^{(1/8) ln(p/(1-p))}.
        let p: f64 = 0.9;
        let gt = -(2.0 * p - 1.0f64).ln();
        let got = overall_error_bound(256, 1, 1.0, gt).unwrap();
        let want = 1.5 * (2.0 / ((2.0 * p - 1.0) * 256.0)).powf((p / (1.0 - p)).ln() / 8.0);
        assert_abs_diff_eq!(got, want, epsilon = 1e-12 * want);
    }

    #[test]
    fn overall_bound_is_linear_in_k() {
        let b1 = overall_error_bound(64, 1, 1.0, 0.2).unwrap();
        let b2 = overall_error_bound(64, 2, 1.0, 0.2).unwrap();
        assert_abs_diff_eq!(b2, 2.0 * b1, epsilon = 1e-14);
    }
}
