//! Integer foundations: primes, factorization, multiplicative functions and
//! exact rationals.

mod factor;
mod primes;
mod rational;

pub use factor::{
    big_omega, factorize, is_almost_prime, mult_functions, Factorization, MultValues,
    FACTORIZE_LIMIT,
};
pub use primes::{is_prime, pow_mod, mul_mod, primes_up_to, prime_table, PrimeTable, PRIME_TABLE_LIMIT};
pub use rational::ExactRational;

/// `floor(sqrt(n))` exactly.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// `floor(cbrt(n))` exactly.
pub fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    let cube = |x: u64| (x as u128) * (x as u128) * (x as u128);
    while r > 0 && cube(r) > n as u128 {
        r -= 1;
    }
    while cube(r + 1) <= n as u128 {
        r += 1;
    }
    r
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_roots() {
        for n in [0u64, 1, 2, 3, 4, 8, 15, 16, 17, 26, 27, 28, 1 << 40, u64::MAX] {
            let s = isqrt(n) as u128;
            assert!(s * s <= n as u128 && (s + 1) * (s + 1) > n as u128);
            let c = icbrt(n) as u128;
            assert!(c * c * c <= n as u128 && (c + 1) * (c + 1) * (c + 1) > n as u128);
        }
    }
}
