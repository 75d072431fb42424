//! Counting results for bit strings without consecutive ones.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Fibonacci numbers with `F(1) = F(2) = 1`.
pub fn fibonacci(n: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// Number of length-`n` bit strings with no two adjacent ones, `F(n + 2)`.
pub fn count_codes(n: usize) -> BigUint {
    fibonacci(n + 2)
}

/// `one[1..=n]` where `one[k]` is the total number of 1-bits over all
/// constrained strings of length `k`; index 0 holds `one[0] = 0`.
pub fn ones_table(n: usize) -> Vec<BigUint> {
    let mut one = vec![BigUint::zero(); n.max(2) + 1];
    one[1] = BigUint::one();
    one[2] = BigUint::from(2u32);
    // (F(k-1), F(k)) as k advances
    let (mut fib_km1, mut fib_k) = (BigUint::one(), BigUint::one());
    for k in 3..=n {
        let next = &fib_k + &fib_km1;
        fib_km1 = std::mem::replace(&mut fib_k, next);
        one[k] = &one[k - 1] + &one[k - 2] + &fib_k;
    }
    one.truncate(n + 1);
    one
}

/// Total number of 1-bits over all constrained strings of length `n`.
pub fn count_ones(n: usize) -> BigUint {
    ones_table(n).pop().expect("table has n + 1 entries")
}

/// Expected share of 1-bits in a constrained code of length `n` ending in 0,
/// `one[n−1] / (n · F(n + 1))`.
pub fn one_bit_density(n: usize) -> f64 {
    one_bit_density_exact(n).to_f64().unwrap_or(f64::NAN)
}

pub fn one_bit_density_exact(n: usize) -> BigRational {
    assert!(n >= 2, "density needs n >= 2");
    let one = ones_table(n - 1).pop().expect("nonempty");
    let den = BigUint::from(n) * fibonacci(n + 1);
    BigRational::new(BigInt::from(one), BigInt::from(den))
}

/// Limiting ratio of substitution-coded to golden-ratio-coded lengths,
/// `(3/2)·log2 φ`.
pub fn length_ratio_limit() -> f64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    1.5 * phi.log2()
}

/// Limiting ratio of 1-bit counts, `(length_ratio_limit / 3) / density`.
pub fn ones_ratio_limit() -> f64 {
    length_ratio_limit() / 3.0 / one_bit_density_limit()
}

/// Limit of [`one_bit_density`]: a maximum-entropy constrained stream is a
/// sequence of `0` and `10` tokens with probabilities `1/φ` and `1/φ²`, so the
/// density is `1 / (φ + 2)`.
pub fn one_bit_density_limit() -> f64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    1.0 / (phi + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerate(n: usize) -> (usize, usize) {
        let (mut count, mut ones) = (0, 0);
        for v in 0u32..(1 << n) {
            if v & (v >> 1) == 0 {
                count += 1;
                ones += v.count_ones() as usize;
            }
        }
        (count, ones)
    }

    #[test]
    fn small_values() {
        assert_eq!(count_codes(1), BigUint::from(2u32));
        assert_eq!(count_codes(2), BigUint::from(3u32));
        assert_eq!(count_codes(5), BigUint::from(13u32));
        assert_eq!(count_ones(1), BigUint::from(1u32));
        assert_eq!(count_ones(2), BigUint::from(2u32));
        assert_eq!(count_ones(3), BigUint::from(5u32));
        for n in 3..=30 {
            assert_eq!(count_codes(n), count_codes(n - 1) + count_codes(n - 2));
        }
    }

    #[test]
    fn matches_enumeration() {
        for n in 1..=20 {
            let (c, o) = enumerate(n);
            assert_eq!(count_codes(n), BigUint::from(c), "n={n}");
            assert_eq!(count_ones(n), BigUint::from(o), "n={n}");
        }
    }

    #[test]
    fn density() {
        // one[9] / (10 · F(11)) = 235 / 890
        let (_, o9) = enumerate(9);
        assert_eq!(o9, 235);
        assert_eq!(
            one_bit_density_exact(10),
            BigRational::new(BigInt::from(235), BigInt::from(890))
        );
        let d = one_bit_density(10_000);
        assert!((d - 0.276).abs() < 0.001, "{d}");
        let mut prev = f64::INFINITY;
        for n in [10, 20, 40, 80, 160, 320] {
            let gap = (one_bit_density(2 * n) - one_bit_density(n)).abs();
            assert!(gap < prev);
            prev = gap;
        }
    }

    #[test]
    fn ratios() {
        assert!((length_ratio_limit() - 1.0413).abs() < 1e-4);
        assert!((ones_ratio_limit() - 1.257).abs() < 0.002);
        assert!((one_bit_density(20_000) - one_bit_density_limit()).abs() < 1e-3);
    }
}
