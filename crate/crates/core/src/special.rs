//! Log-space factorials.
//!
//! Amplitudes of coherent spin states and the factorial ratios of
//! twin-Fock correlation functions overflow `f64` long before the particle
//! numbers of interest, so everything is carried as logarithms.

use std::f64::consts::PI;

/// Below this argument the Stirling series is evaluated at a shifted point.
const STIRLING_MIN: f64 = 15.0;

/// Stirling-series coefficients `B_{2k} / (2k (2k - 1))`.
const STIRLING_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// Falling products shorter than this are summed term by term; longer ones
/// go through `ln_gamma` differences.
const DIRECT_SUM_LIMIT: u64 = 64;

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Returns `NaN` for non-positive or non-finite input.
pub fn ln_gamma(x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return f64::NAN;
    }
    if x >= STIRLING_MIN {
        return stirling(x);
    }
    // Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1))
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < STIRLING_MIN {
        product *= shifted;
        shifted += 1.0;
    }
    stirling(shifted) - product.ln()
}

/// `ln(n!)`. Exact (up to the final rounding) for `n <= 20`.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        let exact: u64 = (1..=n).product();
        (exact as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln(n! / (n - k)!)`, the log of the falling factorial `n (n-1) ... (n-k+1)`.
///
/// Returns `-inf` when `k > n` (the product contains a zero factor).
pub fn ln_falling_factorial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k <= DIRECT_SUM_LIMIT {
        (0..k).map(|j| ((n - j) as f64).ln()).sum()
    } else {
        ln_factorial(n) - ln_factorial(n - k)
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    ln_falling_factorial(n, k) - ln_factorial(k)
}

/// `sqrt(n! / (n - k)!)` evaluated in log space; `0` when `k > n`.
///
/// This is the matrix element of `k` annihilations on an `n`-occupied mode.
pub fn sqrt_falling_factorial(n: u64, k: u64) -> f64 {
    if k > n {
        0.0
    } else if k == 0 {
        1.0
    } else {
        (0.5 * ln_falling_factorial(n, k)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_ln_factorial(n: u64) -> f64 {
        (1..=n).map(|j| (j as f64).ln()).sum()
    }

    #[test]
    fn small_factorials_are_exact() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert_eq!(ln_factorial(5), 120f64.ln());
        assert_eq!(ln_factorial(20), 2_432_902_008_176_640_000f64.ln());
    }

    #[test]
    fn stirling_branch_matches_log_sums() {
        for n in [21u64, 30, 100, 170, 1000, 5000] {
            let reference = exact_ln_factorial(n);
            let rel = (ln_factorial(n) - reference).abs() / reference;
            assert!(rel < 1e-13, "n = {n}: rel {rel:e}");
        }
    }

    #[test]
    fn half_integer_gamma() {
        // Γ(1/2) = sqrt(pi), Γ(7/2) = 15 sqrt(pi) / 8
        assert!((ln_gamma(0.5) - 0.5 * PI.ln()).abs() < 1e-13);
        assert!((ln_gamma(3.5) - (15.0 * PI.sqrt() / 8.0).ln()).abs() < 1e-13);
        assert!((ln_gamma(1.0)).abs() < 1e-13);
        assert!((ln_gamma(2.0)).abs() < 1e-13);
    }

    #[test]
    fn invalid_arguments() {
        assert!(ln_gamma(0.0).is_nan());
        assert!(ln_gamma(-1.5).is_nan());
        assert_eq!(ln_falling_factorial(3, 4), f64::NEG_INFINITY);
        assert_eq!(sqrt_falling_factorial(3, 4), 0.0);
    }

    #[test]
    fn falling_factorials() {
        assert!((ln_falling_factorial(10, 3) - 720f64.ln()).abs() < 1e-14);
        assert_eq!(ln_falling_factorial(7, 0), 0.0);
        assert!((sqrt_falling_factorial(4, 2) - 12f64.sqrt()).abs() < 1e-14);
        // long products switch to the gamma path
        let long = ln_falling_factorial(1000, 200);
        let reference: f64 = (801..=1000).map(|j| (j as f64).ln()).sum();
        assert!((long - reference).abs() / reference < 1e-12);
    }

    #[test]
    fn binomials() {
        assert!((ln_binomial(10, 3).exp() - 120.0).abs() < 1e-10);
        assert!((ln_binomial(50, 25).exp() - 126_410_606_437_752.0).abs() / 1.26e14 < 1e-12);
        assert_eq!(ln_binomial(4, 0), 0.0);
    }
}
