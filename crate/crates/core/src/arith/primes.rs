use crate::error::{Error, Result};

/// Largest `hi` accepted by [`prime_table`].
pub const PRIME_TABLE_LIMIT: u64 = 1_000_000_000_000;
const PLAIN_SIEVE_LIMIT: u64 = 100_000_000;
const MAX_WINDOW: u64 = 1 << 32;
const SEGMENT: u64 = 1 << 18;

/// The primes of a closed interval `[lo, hi]`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    /// Binary-search membership; `n` must lie in `[lo, hi]`.
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

/// All primes in `[lo, hi]`.
///
/// Below `10^8` a plain odd-only sieve is used; above it the window is sieved
/// in segments with the base primes up to `sqrt(hi)`.
pub fn prime_table(lo: u64, hi: u64) -> Result<PrimeTable> {
    if lo > hi {
        return Err(Error::Domain(format!("prime_table: lo {lo} > hi {hi}")));
    }
    if hi > PRIME_TABLE_LIMIT {
        return Err(Error::Capacity(format!(
            "prime_table: hi {hi} exceeds limit {PRIME_TABLE_LIMIT}"
        )));
    }
    if hi - lo > MAX_WINDOW {
        return Err(Error::Capacity(format!(
            "prime_table: window width {} exceeds {MAX_WINDOW}",
            hi - lo
        )));
    }
    let primes = if hi <= PLAIN_SIEVE_LIMIT {
        let mut all = primes_up_to(hi);
        let start = all.partition_point(|&p| p < lo);
        all.drain(..start);
        all
    } else {
        segmented(lo, hi)
    };
    Ok(PrimeTable { lo, hi, primes })
}

/// Sieve of Eratosthenes over odd numbers up to `n` inclusive.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    // index i <-> 2i + 1
    let half = n / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(estimate_count(n as f64));
    out.push(2);
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|&(i, &c)| !c && 2 * i + 1 <= n)
            .map(|(i, _)| (2 * i + 1) as u64),
    );
    out
}

fn estimate_count(x: f64) -> usize {
    if x < 10.0 {
        8
    } else {
        (1.3 * x / x.ln()) as usize
    }
}

fn segmented(lo: u64, hi: u64) -> Vec<u64> {
    let base = primes_up_to(crate::arith::isqrt(hi));
    let mut out = Vec::new();
    let mut seg_lo = lo.max(2);
    while seg_lo <= hi {
        let seg_hi = (seg_lo + SEGMENT - 1).min(hi);
        let mut composite = vec![false; (seg_hi - seg_lo + 1) as usize];
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut start = seg_lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut m = start;
            while m <= seg_hi {
                composite[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|&(_, &c)| !c)
                .map(|(i, _)| seg_lo + i as u64),
        );
        if seg_hi == u64::MAX {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    out
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// Bases {2..17} are exact below 3.4e14; the first twelve primes cover all u64.
const SMALL_BASES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];
const FULL_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const SMALL_BASES_BOUND: u64 = 341_550_071_728_321;

/// Deterministic Miller-Rabin.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in FULL_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let bases: &[u64] = if n < SMALL_BASES_BOUND {
        &SMALL_BASES
    } else {
        &FULL_BASES
    };
    'bases: for &a in bases {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_tables() {
        assert_eq!(prime_table(2, 10).unwrap().primes, vec![2, 3, 5, 7]);
        assert!(prime_table(1, 1).unwrap().is_empty());
        assert!(prime_table(0, 0).unwrap().is_empty());
        assert_eq!(prime_table(2, 2).unwrap().primes, vec![2]);
    }

    #[test]
    fn window_above_a_million_matches_trial_division() {
        let t = prime_table(1_000_000, 1_000_100).unwrap();
        let oracle: Vec<u64> = (1_000_000..=1_000_100).filter(|&n| trial_division(n)).collect();
        assert_eq!(t.primes, oracle);
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn segmented_window_matches_miller_rabin() {
        let lo = PLAIN_SIEVE_LIMIT + 12_345;
        let t = prime_table(lo, lo + 20_000).unwrap();
        let oracle: Vec<u64> = (lo..=lo + 20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(t.primes, oracle);
        let near_limit = prime_table(PRIME_TABLE_LIMIT - 1000, PRIME_TABLE_LIMIT).unwrap();
        assert!(near_limit.iter().all(|p| trial_division(p)));
    }

    #[test]
    fn limits_and_domain() {
        assert!(matches!(prime_table(5, 4), Err(Error::Domain(_))));
        assert!(matches!(
            prime_table(0, PRIME_TABLE_LIMIT + 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
        // strong pseudoprimes to several small bases
        for n in [3_215_031_751u64, 2_152_302_898_747, 3_474_749_660_383, 341_550_071_728_321] {
            assert!(!is_prime(n));
        }
        assert!(is_prime(999_999_999_989));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn prime_counting_is_near_x_over_log_x() {
        for x in [1_000u64, 10_000, 100_000, 1_000_000] {
            let pi = primes_up_to(x).len() as f64;
            let approx = x as f64 / (x as f64).ln();
            assert!(((pi - approx) / approx).abs() <= 0.2, "x = {x}");
        }
    }
}
