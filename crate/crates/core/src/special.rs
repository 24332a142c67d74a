//! Scalar special functions used across the crate: log-factorials,
//! log-domain sums, and the error function with its inverse.
//!
//! Binomial and multiplicity arithmetic is done in the log domain
//! throughout, since ensemble sizes reach into the thousands.

use std::sync::OnceLock;

const LN_FACT_TABLE_LEN: usize = 1 << 16;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; LN_FACT_TABLE_LEN];
        for k in 2..LN_FACT_TABLE_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// ln(n!), exact summation for n below 2^16, Stirling series beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACT_TABLE_LEN {
        return ln_fact_table()[n as usize];
    }
    // Stirling with correction terms; relative error < 1e-14 for n >= 2^16.
    let x = n as f64 + 1.0;
    let ln_sqrt_2pi = 0.918_938_533_204_672_74;
    (x - 0.5) * x.ln() - x + ln_sqrt_2pi + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
}

/// ln C(n, k); `-inf` outside the valid range.
pub fn ln_binomial(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return f64::NEG_INFINITY;
    }
    let k = k as u64;
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Numerically safe ln(Σ exp(xᵢ)).
pub fn ln_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6;

/// Error function, |relative error| below 1e-14.
///
/// Power series for small arguments, Lentz continued fraction for the
/// complementary function elsewhere.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 1.5 {
        erf_series(x)
    } else {
        1.0 - erfc_cf(x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 1.5 {
        1.0 - erf(x)
    } else {
        erfc_cf(x)
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = (2/sqrt(pi)) * sum_k (-1)^k x^(2k+1) / (k! (2k+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x2 / kf;
        let add = term / (2.0 * kf + 1.0);
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

fn erfc_cf(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    // evaluated by the modified Lentz algorithm.
    let tiny = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..300 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
}

/// Inverse error function on (-1, 1), Newton-refined to 1e-12 residual.
pub fn erf_inv(p: f64) -> f64 {
    assert!(p > -1.0 && p < 1.0, "erf_inv domain is (-1, 1), got {p}");
    if p == 0.0 {
        return 0.0;
    }
    if p < 0.0 {
        return -erf_inv(-p);
    }
    // Winitzki's rational guess, accurate to a few 1e-3.
    let a = 0.147;
    let l = (1.0 - p * p).ln();
    let t = 2.0 / (std::f64::consts::PI * a) + l / 2.0;
    let mut x = (((t * t - l / a).sqrt()) - t).sqrt();
    // Newton: f(x) = erf(x) - p, f'(x) = 2/sqrt(pi) exp(-x^2)
    for _ in 0..60 {
        let r = erf(x) - p;
        let step = r / (FRAC_2_SQRT_PI * (-x * x).exp());
        x -= step;
        if step.abs() < 1e-13 * x.abs().max(1.0) {
            break;
        }
    }
    debug_assert!((erf(x) - p).abs() < 1e-12);
    x
}
