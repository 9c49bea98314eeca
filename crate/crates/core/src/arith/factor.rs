use super::primes::{is_prime, mul_mod};
use crate::error::{Error, Result};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest `n` accepted by [`factorize`]; any `u64` works.
pub const FACTORIZE_LIMIT: u64 = u64::MAX;
const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_SEED: u64 = 0x5eed_f00d;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    /// `(prime, exponent)` with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Total number of prime factors with multiplicity; `Ω(1) = 0`.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    /// All positive divisors, unsorted.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out
    }
}

/// Complete factorization: trial division to `10^6`, then Brent's variant
/// of Pollard rho with a fixed seed for whatever remains.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("factorize: n must be positive".into()));
    }
    let mut rest = n;
    let mut found: Vec<u64> = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        while *rest % p == 0 {
            *rest /= p;
            found.push(p);
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    let mut d = 5u64;
    while d <= TRIAL_LIMIT && d * d <= rest {
        push(d, &mut rest);
        push(d + 2, &mut rest);
        d += 6;
    }
    if rest > 1 {
        if rest < d * d || is_prime(rest) {
            found.push(rest);
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(RHO_SEED);
            split_into(rest, &mut found, &mut rng);
        }
    }
    found.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

fn split_into(n: u64, out: &mut Vec<u64>, rng: &mut ChaCha8Rng) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = brent(n, rng);
    split_into(d, out, rng);
    split_into(n / d, out, rng);
}

fn brent(n: u64, rng: &mut ChaCha8Rng) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    loop {
        let c = rng.gen_range(1..n);
        let mut y = rng.gen_range(0..n);
        let m = 128u64;
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let f = |v: u64| ((mul_mod(v, v, n) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut ys) = (y, y);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}

/// The multiplicative values reported by [`mult_functions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultValues {
    pub mu: i8,
    pub phi: u64,
    pub big_omega: u32,
    /// `(k, τ_k(n))` for each requested `k`.
    pub tau: Vec<(u32, u128)>,
}

/// Möbius, Euler phi, Ω and the divisor functions `τ_k` for each `k` in `ks`.
pub fn mult_functions(n: u64, ks: &[u32]) -> Result<MultValues> {
    let f = factorize(n)?;
    Ok(values_from(&f, ks))
}

pub(crate) fn values_from(f: &Factorization, ks: &[u32]) -> MultValues {
    let mu = if !f.is_squarefree() {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    };
    let phi = f
        .factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product();
    // τ_k(p^e) = C(e + k - 1, k - 1)
    let tau = ks
        .iter()
        .map(|&k| {
            let t = f
                .factors
                .iter()
                .map(|&(_, e)| binomial((e + k - 1) as u128, (k.max(1) - 1) as u128))
                .product();
            (k, if k == 0 { u128::from(f.n == 1) } else { t })
        })
        .collect();
    MultValues {
        mu,
        phi,
        big_omega: f.big_omega(),
        tau,
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

pub fn big_omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.big_omega())
}

/// `Ω(n) <= r`. By convention `1` counts as an almost-prime of every order,
/// but the public contract starts at `n = 2`.
pub fn is_almost_prime(n: u64, r: u32) -> Result<bool> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "is_almost_prime: n = {n} has no prime factors (Ω(1) = 0 by convention)"
        )));
    }
    Ok(big_omega(n)? <= r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;
    use rand::Rng;

    #[test]
    fn known_factorizations() {
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(360).unwrap().factors, vec![(2, 3), (3, 2), (5, 1)]);
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
    }

    #[test]
    fn twelve_digit_semiprime() {
        // both factors above the trial-division limit
        let (p, q) = (1_000_003u64, 999_983u64);
        assert!(is_prime(p) && is_prime(q));
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors, vec![(q, 1), (p, 1)]);
        assert_eq!(f.product(), (p * q) as u128);
        let big = 4_294_967_291u64 * 4_294_967_279;
        let f = factorize(big).unwrap();
        assert_eq!(f.product(), big as u128);
        assert!(f.primes().all(is_prime));
    }

    #[test]
    fn multiply_back_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..10_000 {
            let n = match i % 3 {
                0 => rng.gen_range(1..1_000_000u64),
                1 => rng.gen_range(1..u64::MAX / 2),
                _ => rng.gen_range(1..1u64 << 40),
            };
            let f = factorize(n).unwrap();
            assert_eq!(f.product(), n as u128);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn small_values() {
        let v = mult_functions(1, &[2]).unwrap();
        assert_eq!((v.mu, v.phi, v.big_omega, v.tau[0].1), (1, 1, 0, 1));
        let v = mult_functions(12, &[2]).unwrap();
        assert_eq!((v.mu, v.phi, v.big_omega, v.tau[0].1), (0, 4, 3, 6));
        let v = mult_functions(30, &[2, 3]).unwrap();
        assert_eq!((v.mu, v.phi, v.big_omega, v.tau[0].1), (-1, 8, 3, 8));
        assert_eq!(v.tau[1].1, 27);
    }

    #[test]
    fn divisor_sums_exhaustive() {
        // sieve oracles for μ and φ, independent of factorize
        const N: usize = 100_000;
        let mut mu = vec![1i32; N + 1];
        let mut phi: Vec<u64> = (0..=N as u64).collect();
        for p in primes_up_to(N as u64) {
            let p = p as usize;
            for m in (p..=N).step_by(p) {
                mu[m] = -mu[m];
                phi[m] = phi[m] / p as u64 * (p as u64 - 1);
            }
            for m in (p * p..=N).step_by(p * p) {
                mu[m] = 0;
            }
        }
        let mut mu_sum = vec![0i32; N + 1];
        let mut phi_sum = vec![0u64; N + 1];
        for d in 1..=N {
            for m in (d..=N).step_by(d) {
                mu_sum[m] += mu[d];
                phi_sum[m] += phi[d];
            }
        }
        for n in 1..=N {
            assert_eq!(mu_sum[n], i32::from(n == 1));
            assert_eq!(phi_sum[n], n as u64);
        }
        for n in (1..=N).step_by(97) {
            let v = mult_functions(n as u64, &[]).unwrap();
            assert_eq!(v.mu as i32, mu[n]);
            assert_eq!(v.phi, phi[n]);
        }
    }

    #[test]
    fn tau_k_matches_divisor_counting() {
        for n in 1..500u64 {
            let f = factorize(n).unwrap();
            let v = values_from(&f, &[2, 3]);
            let t2 = f.divisors().len() as u128;
            let t3: u128 = f
                .divisors()
                .iter()
                .map(|&d| factorize(n / d).unwrap().divisors().len() as u128)
                .sum();
            assert_eq!(v.tau, vec![(2, t2), (3, t3)]);
        }
    }

    #[test]
    fn almost_primes() {
        assert!(is_almost_prime(7, 1).unwrap());
        assert!(is_almost_prime(64, 6).unwrap());
        assert!(!is_almost_prime(128, 6).unwrap());
        assert!(is_almost_prime(1, 1).is_err());
        assert_eq!(big_omega(1).unwrap(), 0);
    }
}
