//! Dense Hermitian linear algebra on top of nalgebra.
//!
//! Complex Hermitian eigenproblems are reduced to real symmetric ones via
//! the standard 2n x 2n embedding A + iB -> [[A, -B], [B, A]], which is a
//! *-isomorphism: spectra double up and spectral functions commute with the
//! embedding, so trace norms, PSD square roots and fidelities never need an
//! explicit complex eigensolver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Largest absolute imaginary part of any entry.
pub fn max_imag(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Largest |m - m†| entry.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// (m + m†)/2.
pub fn hermitian_part(m: &CMat) -> CMat {
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * Complex64::new(0.5, 0.0);
        }
    }
    out
}

pub fn real_part(m: &CMat) -> RMat {
    RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

pub fn imag_part(m: &CMat) -> RMat {
    RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].im)
}

pub fn to_complex(m: &RMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

/// Real symmetric embedding [[A, -B], [B, A]] of a complex matrix A + iB.
pub fn embed_real(m: &CMat) -> RMat {
    let n = m.nrows();
    let mut e = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            e[(i, j)] = z.re;
            e[(i + n, j + n)] = z.re;
            e[(i, j + n)] = -z.im;
            e[(i + n, j)] = z.im;
        }
    }
    e
}

fn unembed(e: &RMat) -> CMat {
    let n = e.nrows() / 2;
    CMat::from_fn(n, n, |i, j| Complex64::new(e[(i, j)], e[(i + n, j)]))
}

const REAL_TOL: f64 = 1e-13;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut vals = if max_imag(m) < REAL_TOL {
        real_part(m).symmetric_eigenvalues().iter().cloned().collect::<Vec<_>>()
    } else {
        // Embedded spectrum contains each eigenvalue twice; de-duplicate by
        // sorting and taking every other entry.
        let mut all: Vec<f64> = embed_real(m).symmetric_eigenvalues().iter().cloned().collect();
        all.sort_by(f64::total_cmp);
        all.into_iter().step_by(2).collect()
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// Σ|λᵢ| of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    if max_imag(m) < REAL_TOL {
        real_part(m)
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.abs())
            .sum()
    } else {
        embed_real(m)
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.abs())
            .sum::<f64>()
            / 2.0
    }
}

/// Trace distance (1/2)‖a − b‖₁ between Hermitian operators.
pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    0.5 * trace_norm_hermitian(&(a - b))
}

/// Spectral function f(m) of a Hermitian matrix.
pub fn hermitian_matrix_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    if max_imag(m) < REAL_TOL {
        let se = real_part(m).symmetric_eigen();
        let fl = RVec::from_iterator(se.eigenvalues.len(), se.eigenvalues.iter().map(|&l| f(l)));
        let out = &se.eigenvectors * RMat::from_diagonal(&fl) * se.eigenvectors.transpose();
        to_complex(&out)
    } else {
        let se = embed_real(m).symmetric_eigen();
        let fl = RVec::from_iterator(se.eigenvalues.len(), se.eigenvalues.iter().map(|&l| f(l)));
        let out = &se.eigenvectors * RMat::from_diagonal(&fl) * se.eigenvectors.transpose();
        unembed(&out)
    }
}

/// PSD square root; small negative eigenvalues are clipped to zero.
pub fn sqrtm_psd(m: &CMat) -> CMat {
    hermitian_matrix_function(m, |l| l.max(0.0).sqrt())
}

/// Uhlmann fidelity F(a, b) = Tr√(√a b √a) of two (sub-normalized) PSD
/// operators. Returns the root fidelity, not its square.
pub fn fidelity(a: &CMat, b: &CMat) -> f64 {
    let sa = sqrtm_psd(a);
    let inner = &sa * b * &sa;
    hermitian_eigenvalues(&hermitian_part(&inner))
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m)[0]
}

pub fn trace(m: &CMat) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Tr[ρ²] of a Hermitian operator.
pub fn purity(m: &CMat) -> f64 {
    let mut s = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            s += (m[(i, j)] * m[(j, i)]).re;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn example_hermitian() -> CMat {
        let mut m = CMat::zeros(3, 3);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        m[(2, 2)] = Complex64::new(0.25, 0.0);
        m[(0, 1)] = Complex64::new(0.3, 0.4);
        m[(1, 0)] = m[(0, 1)].conj();
        m[(1, 2)] = Complex64::new(-0.2, 0.1);
        m[(2, 1)] = m[(1, 2)].conj();
        m
    }

    #[test]
    fn trace_norm_matches_eigenvalue_sum() {
        let m = example_hermitian();
        let direct: f64 = hermitian_eigenvalues(&m).iter().map(|l| l.abs()).sum();
        assert_abs_diff_eq!(trace_norm_hermitian(&m), direct, epsilon = 1e-12);
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let m = example_hermitian();
        let s: f64 = hermitian_eigenvalues(&m).iter().sum();
        assert_abs_diff_eq!(s, trace(&m).re, epsilon = 1e-12);
    }

    #[test]
    fn sqrtm_squares_back() {
        // PSD matrix: m† m
        let m = example_hermitian();
        let psd = {
            let mut adj = m.clone();
            adj.adjoint_mut();
            adj * &m
        };
        let r = sqrtm_psd(&psd);
        let back = &r * &r;
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(back[(i, j)].re, psd[(i, j)].re, epsilon = 1e-10);
                assert_abs_diff_eq!(back[(i, j)].im, psd[(i, j)].im, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn fidelity_of_identical_states_is_one() {
        let mut rho = example_hermitian();
        // shift to PSD and normalize
        let min = min_eigenvalue(&rho);
        for i in 0..3 {
            rho[(i, i)] -= Complex64::new(min - 0.1, 0.0);
        }
        let tr = trace(&rho).re;
        rho /= Complex64::new(tr, 0.0);
        assert_abs_diff_eq!(fidelity(&rho, &rho), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn fidelity_pure_states_is_overlap() {
        // |0><0| vs |+><+| : F = 1/sqrt(2)
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = Complex64::new(1.0, 0.0);
        let mut b = CMat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                b[(i, j)] = Complex64::new(0.5, 0.0);
            }
        }
        assert_abs_diff_eq!(fidelity(&a, &b), 0.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn trace_distance_orthogonal_pure_states() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = Complex64::new(1.0, 0.0);
        let mut b = CMat::zeros(2, 2);
        b[(1, 1)] = Complex64::new(1.0, 0.0);
        assert_abs_diff_eq!(trace_distance(&a, &b), 1.0, epsilon = 1e-12);
    }
}
