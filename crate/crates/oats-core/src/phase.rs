//! Phase arithmetic helpers.
//!
//! Squeezing phases and decomposition coefficients are rational multiples of
//! pi. Reducing the rational modulo 2 in integer arithmetic before touching
//! floating point keeps identities that hold exactly in theory (periodicity of
//! the Gauss-sum terms, start-point invariance) exact in the simulation too.

use num_complex::Complex64;
use std::f64::consts::PI;

/// e^(i * pi * num / den), with the angle reduced to [0, 2*pi) exactly.
///
/// `den` must be positive. The reduction `num mod 2*den` is exact in i64, so
/// two calls whose arguments differ by a multiple of `2*den` return
/// bit-identical results.
pub fn cis_pi_ratio(num: i64, den: i64) -> Complex64 {
    debug_assert!(den > 0);
    let reduced = num.rem_euclid(2 * den);
    Complex64::cis(PI * reduced as f64 / den as f64)
}

/// Balanced (pairwise) summation; bounds rounding growth to O(log n) for the
/// long Gauss sums.
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    if terms.len() <= 8 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms {
            acc += t;
        }
        return acc;
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_is_exact_over_periods() {
        // num and num + 2*den must map to the same bits
        for num in [-17i64, -3, 0, 5, 123] {
            for den in [1i64, 2, 7, 40] {
                let a = cis_pi_ratio(num, den);
                let b = cis_pi_ratio(num + 2 * den, den);
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn quarter_turns() {
        let i = cis_pi_ratio(1, 2);
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let minus_one = cis_pi_ratio(1, 1);
        assert!((minus_one - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pairwise_matches_sequential() {
        let terms: Vec<Complex64> = (0..1000).map(|k| Complex64::cis(0.01 * k as f64)).collect();
        let seq: Complex64 = terms.iter().sum();
        let pair = pairwise_sum(&terms);
        assert!((seq - pair).norm() < 1e-10);
    }
}
