//! Recursive construction of total-spin eigenbases for n qubits.
//!
//! Sectors are reached by coupling one qubit at a time; a multiplicity copy
//! of sector J corresponds to a path 1/2 -> ... -> J of intermediate spins,
//! and the uniform mixture over the multiplicity register is realized by
//! drawing such a path uniformly. Basis vectors are assembled with the
//! standard (Condon-Shortley) spin-coupling coefficients, using the
//! convention that |1> is the excited (spin-up) single-qubit level, so
//! |J,m> contains J+m excited qubits.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::spin::Spin;

/// Keeps path-count tables compact; the vector machinery targets small
/// ensembles anyway (dense 2^n amplitudes).
pub const MAX_PATH_QUBITS: u32 = 64;

/// Number-of-paths table for walks ending in `target` after `n` steps.
///
/// `counts[i][two_j]` is the number of admissible continuations from
/// (i qubits coupled, current spin two_j/2) to (n, target).
#[derive(Clone, Debug)]
pub struct PathTable {
    pub n: u32,
    pub target: Spin,
    counts: Vec<Vec<u128>>,
}

impl PathTable {
    pub fn new(n: u32, target: Spin) -> Result<Self> {
        if n == 0 || n > MAX_PATH_QUBITS {
            return Err(invalid(format!("path table supports 1..={MAX_PATH_QUBITS} qubits, got {n}")));
        }
        if target.two_j() > n || (n - target.two_j()) % 2 != 0 {
            return Err(invalid(format!(
                "sector J = {}/2 incompatible with {n} qubits",
                target.two_j()
            )));
        }
        let n_us = n as usize;
        let mut counts = vec![vec![0u128; n_us + 2]; n_us + 1];
        counts[n_us][target.two_j() as usize] = 1;
        for i in (1..n_us).rev() {
            for two_j in 0..=i {
                if (i - two_j) % 2 != 0 {
                    continue;
                }
                let up = counts[i + 1][two_j + 1];
                let down = if two_j >= 1 { counts[i + 1][two_j - 1] } else { 0 };
                counts[i][two_j] = up
                    .checked_add(down)
                    .ok_or_else(|| invalid("path count overflow"))?;
            }
        }
        Ok(PathTable { n, target, counts })
    }

    /// Total number of paths, i.e. the multiplicity m_J.
    pub fn total(&self) -> u128 {
        if self.n == 1 {
            return 1;
        }
        self.counts[1][1]
    }

    /// Draw a path uniformly at random; entry i is the doubled intermediate
    /// spin after coupling i+1 qubits (so it starts at 1 and ends at the
    /// target).
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        let n = self.n as usize;
        let mut path = Vec::with_capacity(n);
        let mut two_j = 1usize;
        path.push(1);
        for i in 1..n {
            let up = self.counts[i + 1][two_j + 1];
            let down = if two_j >= 1 { self.counts[i + 1][two_j - 1] } else { 0 };
            let total = up + down;
            debug_assert!(total > 0);
            let go_up = if down == 0 {
                true
            } else if up == 0 {
                false
            } else {
                rng.random::<f64>() * (total as f64) < up as f64
            };
            two_j = if go_up { two_j + 1 } else { two_j - 1 };
            path.push(two_j as u32);
        }
        path
    }

    /// Enumerate every path (oracle-sized sectors only).
    pub fn all_paths(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = vec![1u32];
        self.enumerate(1, 1, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, i: usize, two_j: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let n = self.n as usize;
        if i == n {
            if two_j == self.target.two_j() as usize {
                out.push(cur.clone());
            }
            return;
        }
        if self.counts[i + 1][two_j + 1] > 0 {
            cur.push(two_j as u32 + 1);
            self.enumerate(i + 1, two_j + 1, cur, out);
            cur.pop();
        }
        if two_j >= 1 && self.counts[i + 1][two_j - 1] > 0 {
            cur.push(two_j as u32 - 1);
            self.enumerate(i + 1, two_j - 1, cur, out);
            cur.pop();
        }
    }
}

/// Basis vectors |J,m> (m = J..-J) of the multiplicity copy selected by
/// `path`, as dense amplitudes over n qubits (qubit i is bit i).
pub fn path_basis(path: &[u32]) -> Vec<Vec<Complex64>> {
    assert!(!path.is_empty() && path[0] == 1, "path must start at spin 1/2");
    let n = path.len();
    assert!(n <= MAX_PATH_QUBITS as usize);
    // Qubit 1: |1/2, +1/2> = |1>, |1/2, -1/2> = |0>.
    let mut cur: Vec<Vec<Complex64>> = vec![
        vec![Complex64::ZERO, Complex64::new(1.0, 0.0)],
        vec![Complex64::new(1.0, 0.0), Complex64::ZERO],
    ];
    let mut two_j_old = 1u32;
    for (step, &two_j_new) in path.iter().enumerate().skip(1) {
        debug_assert!(
            two_j_new == two_j_old + 1 || two_j_new + 1 == two_j_old,
            "invalid coupling step {two_j_old} -> {two_j_new}"
        );
        let dim_old = 1usize << step;
        let dim_new = dim_old << 1;
        let new_levels = two_j_new as usize + 1;
        let mut next: Vec<Vec<Complex64>> = vec![vec![Complex64::ZERO; dim_new]; new_levels];
        let denom = 2.0 * (two_j_old as f64 + 1.0);
        let up_branch = two_j_new > two_j_old;
        for (row, vec_new) in next.iter_mut().enumerate() {
            let two_m = two_j_new as i32 - 2 * row as i32;
            // amplitudes on |j_old, m -/+ 1/2> (x) |1>/|0>
            let a_plus = ((two_j_old as f64 + two_m as f64 + 1.0) / denom).sqrt();
            let a_minus = ((two_j_old as f64 - two_m as f64 + 1.0) / denom).sqrt();
            let (c_up, c_down) = if up_branch { (a_plus, a_minus) } else { (-a_minus, a_plus) };
            // contribution of |j_old, m - 1/2> tensored with |1>
            let two_m_lo = two_m - 1;
            if two_m_lo.abs() <= two_j_old as i32 {
                let idx = ((two_j_old as i32 - two_m_lo) / 2) as usize;
                for (x, amp) in cur[idx].iter().enumerate() {
                    vec_new[x + dim_old] += amp * c_up;
                }
            }
            // contribution of |j_old, m + 1/2> tensored with |0>
            let two_m_hi = two_m + 1;
            if two_m_hi.abs() <= two_j_old as i32 {
                let idx = ((two_j_old as i32 - two_m_hi) / 2) as usize;
                for (x, amp) in cur[idx].iter().enumerate() {
                    vec_new[x] += amp * c_down;
                }
            }
        }
        cur = next;
        two_j_old = two_j_new;
    }
    cur
}
