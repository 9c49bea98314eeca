//! Counting solutions of `d^2 x^2 + u1^3 + ... + u5^3 ≡ N (mod q)` with unit
//! `u_j`. Three independent routes: a literal loop for tiny moduli, cyclic
//! histogram convolution for `q <= 10^4`, and an `O(p)` algebra over the
//! cubic residue classes for primes.

use super::power_sum::power_histogram;
use crate::arith::{factorize, gcd, is_prime, pow_mod};
use crate::error::{Error, Result};

/// Literal six-fold loop; `q^6` work, so kept to tiny moduli.
pub const NAIVE_LIMIT: u64 = 24;
pub const HISTOGRAM_LIMIT: u64 = 10_000;
pub const CLASS_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMethod {
    #[default]
    Auto,
    Naive,
    Histogram,
    ClassAlgebra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountVariant {
    /// Five unit cubes only.
    K,
    /// One square plus five unit cubes.
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongruenceCounts {
    pub q: u64,
    pub n_residue: u64,
    pub d: u64,
    pub k: u128,
    pub l: u128,
}

impl CongruenceCounts {
    pub fn get(&self, v: CountVariant) -> u128 {
        match v {
            CountVariant::K => self.k,
            CountVariant::L => self.l,
        }
    }
}

/// Counts for every residue `N mod q` at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub q: u64,
    pub d: u64,
    pub k: Vec<u128>,
    pub l: Vec<u128>,
}

fn resolve(q: u64, method: CountMethod) -> Result<CountMethod> {
    if q == 0 {
        return Err(Error::Domain("count_congruence: q must be >= 1".into()));
    }
    let m = match method {
        CountMethod::Auto if q >= 5 && q <= CLASS_LIMIT && is_prime(q) => CountMethod::ClassAlgebra,
        CountMethod::Auto => CountMethod::Histogram,
        m => m,
    };
    let (ok, limit) = match m {
        CountMethod::Naive => (q <= NAIVE_LIMIT, NAIVE_LIMIT),
        CountMethod::Histogram => (q <= HISTOGRAM_LIMIT, HISTOGRAM_LIMIT),
        CountMethod::ClassAlgebra => {
            if !(q >= 5 && is_prime(q)) {
                return Err(Error::Domain(format!(
                    "class-algebra counts need a prime q >= 5, got {q}"
                )));
            }
            (q <= CLASS_LIMIT, CLASS_LIMIT)
        }
        CountMethod::Auto => unreachable!(),
    };
    if !ok {
        return Err(Error::Capacity(format!(
            "count_congruence: q = {q} exceeds the {m:?} limit {limit}"
        )));
    }
    Ok(m)
}

/// One count, `𝔎` or `𝔏`, for a single residue.
pub fn count_congruence(
    q: u64,
    n: u64,
    variant: CountVariant,
    d: u64,
    method: CountMethod,
) -> Result<u128> {
    Ok(congruence_counts(q, n, d, method)?.get(variant))
}

/// Both counts `𝔎(q, N)` and `𝔏_d(q, N)` (the square slot holds `d x`).
pub fn congruence_counts(q: u64, n: u64, d: u64, method: CountMethod) -> Result<CongruenceCounts> {
    let n_residue = n % q.max(1);
    let (k, l) = match resolve(q, method)? {
        CountMethod::ClassAlgebra => {
            let alg = CubeClasses::new(q);
            let kf = alg.five_cubes();
            let k = alg.eval(&kf, n_residue);
            let l = if d % q == 0 {
                q as u128 * k
            } else {
                (0..q)
                    .map(|x| {
                        let s = pow_mod(x, 2, q);
                        alg.eval(&kf, (n_residue + q - s) % q)
                    })
                    .sum()
            };
            (k, l)
        }
        m => {
            let t = count_table(q, d, m)?;
            (t.k[n_residue as usize], t.l[n_residue as usize])
        }
    };
    Ok(CongruenceCounts {
        q,
        n_residue,
        d,
        k,
        l,
    })
}

/// Counts for all residues mod `q`.
pub fn count_table(q: u64, d: u64, method: CountMethod) -> Result<CountTable> {
    let (k, l) = match resolve(q, method)? {
        CountMethod::Naive => naive_table(q, d),
        CountMethod::Histogram => histogram_table(q, d),
        CountMethod::ClassAlgebra => {
            if q > HISTOGRAM_LIMIT {
                return Err(Error::Capacity(format!(
                    "count_table: full table for q = {q} exceeds {HISTOGRAM_LIMIT}"
                )));
            }
            let alg = CubeClasses::new(q);
            let kf = alg.five_cubes();
            let k: Vec<u128> = (0..q).map(|r| alg.eval(&kf, r)).collect();
            let sq = power_histogram(q, 2, false, d);
            (k.clone(), cyclic_mul(&sq, &k))
        }
        CountMethod::Auto => unreachable!(),
    };
    Ok(CountTable { q, d, k, l })
}

fn naive_table(q: u64, d: u64) -> (Vec<u128>, Vec<u128>) {
    let units: Vec<u64> = (1..=q).filter(|&u| gcd(u, q) == 1).collect();
    let qs = q as usize;
    let mut k = vec![0u128; qs];
    let mut l = vec![0u128; qs];
    let cube = |u: u64| pow_mod(u, 3, q);
    for &u1 in &units {
        for &u2 in &units {
            for &u3 in &units {
                for &u4 in &units {
                    for &u5 in &units {
                        let s = (cube(u1) + cube(u2) + cube(u3) + cube(u4) + cube(u5)) % q;
                        k[s as usize] += 1;
                        for x in 1..=q {
                            let dx = (d % q) * x % q;
                            l[((s + dx * dx) % q) as usize] += 1;
                        }
                    }
                }
            }
        }
    }
    (k, l)
}

/// Cyclic convolution `(a * b)[r] = Σ_s a[s] b[r - s]`, skipping zeros of `a`.
fn cyclic_mul(a: &[u64], b: &[u128]) -> Vec<u128> {
    let q = b.len();
    let mut out = vec![0u128; q];
    for (s, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        let ca = ca as u128;
        for (t, &cb) in b.iter().enumerate() {
            if cb != 0 {
                let r = if s + t >= q { s + t - q } else { s + t };
                out[r] += ca * cb;
            }
        }
    }
    out
}

fn histogram_table(q: u64, d: u64) -> (Vec<u128>, Vec<u128>) {
    let c = power_histogram(q, 3, true, 1);
    let mut k: Vec<u128> = c.iter().map(|&v| v as u128).collect();
    for _ in 0..4 {
        k = cyclic_mul(&c, &k);
    }
    let sq = power_histogram(q, 2, false, d);
    let l = cyclic_mul(&sq, &k);
    (k, l)
}

/// Functions on `Z/p` that are constant on `{0}` and on each coset of the
/// cubes in the unit group.
#[derive(Debug, Clone, PartialEq)]
struct ClassFn {
    zero: u128,
    coset: Vec<u128>,
}

/// The cyclotomic data of the cube classes mod a prime `p`: the coset index of
/// every unit and `M[i][j] = #{ s != 0, 1 : s ∈ C_i, 1 - s ∈ C_j }`.
struct CubeClasses {
    p: u64,
    e: usize,
    class: Vec<u8>,
    m: Vec<Vec<u128>>,
}

fn primitive_root(p: u64) -> u64 {
    let f = factorize(p - 1).expect("p >= 2");
    (2..p)
        .find(|&g| f.primes().all(|r| pow_mod(g, (p - 1) / r, p) != 1))
        .unwrap_or(1)
}

impl CubeClasses {
    fn new(p: u64) -> Self {
        let e = if p % 3 == 1 { 3 } else { 1 };
        let mut class = vec![u8::MAX; p as usize];
        let g = primitive_root(p);
        let mut x = 1u64;
        for i in 0..p - 1 {
            class[x as usize] = (i % e as u64) as u8;
            x = x * g % p;
        }
        let mut m = vec![vec![0u128; e]; e];
        for s in 2..p {
            let i = class[s as usize] as usize;
            let j = class[(p + 1 - s) as usize] as usize;
            m[i][j] += 1;
        }
        CubeClasses { p, e, class, m }
    }

    fn eval(&self, f: &ClassFn, n: u64) -> u128 {
        if n % self.p == 0 {
            f.zero
        } else {
            f.coset[self.class[(n % self.p) as usize] as usize]
        }
    }

    fn conv(&self, f: &ClassFn, g: &ClassFn) -> ClassFn {
        let e = self.e;
        let size = ((self.p - 1) / e as u64) as u128;
        let neg_one = self.class[(self.p - 1) as usize] as usize;
        let zero = f.zero * g.zero
            + size
                * (0..e)
                    .map(|i| f.coset[i] * g.coset[(i + neg_one) % e])
                    .sum::<u128>();
        let coset = (0..e)
            .map(|k| {
                let mut v = f.zero * g.coset[k] + f.coset[k] * g.zero;
                for i in 0..e {
                    for j in 0..e {
                        v += self.m[i][j] * f.coset[(k + i) % e] * g.coset[(k + j) % e];
                    }
                }
                v
            })
            .collect();
        ClassFn { zero, coset }
    }

    /// Number of ways to write each residue as a sum of five unit cubes.
    fn five_cubes(&self) -> ClassFn {
        // every cube of a unit has exactly e cube roots
        let mut coset = vec![0u128; self.e];
        coset[0] = self.e as u128;
        let c = ClassFn { zero: 0, coset };
        let mut acc = c.clone();
        for _ in 0..4 {
            acc = self.conv(&acc, &c);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        for n in [0u64, 2, 4] {
            let c = congruence_counts(2, n, 1, CountMethod::Naive).unwrap();
            assert_eq!((c.k, c.l), (0, 1));
        }
        let c = congruence_counts(9, 1, 1, CountMethod::Histogram).unwrap();
        assert_eq!(c.k, 2430);
        let c = congruence_counts(5, 0, 1, CountMethod::Auto).unwrap();
        assert_eq!((c.k, c.l), (204, 1024));
        assert_eq!(count_congruence(5, 0, CountVariant::L, 1, CountMethod::Naive).unwrap(), 1024);
    }

    #[test]
    fn routes_agree_on_small_moduli() {
        for q in 1..=13u64 {
            for d in [1u64, 2, 3, 5] {
                let naive = count_table(q, d, CountMethod::Naive).unwrap();
                let hist = count_table(q, d, CountMethod::Histogram).unwrap();
                assert_eq!(naive, hist, "q={q} d={d}");
                if q >= 5 && is_prime(q) {
                    let cls = count_table(q, d, CountMethod::ClassAlgebra).unwrap();
                    assert_eq!(cls, hist, "q={q} d={d}");
                }
            }
        }
    }

    #[test]
    fn class_algebra_matches_histogram_for_larger_primes() {
        for p in [17u64, 19, 31, 37, 43, 61, 97, 101, 211, 499] {
            for d in [1u64, p] {
                let a = count_table(p, d, CountMethod::ClassAlgebra).unwrap();
                let b = count_table(p, d, CountMethod::Histogram).unwrap();
                assert_eq!(a, b, "p={p}");
                for n in [0u64, 1, 5, p - 1] {
                    let c = congruence_counts(p, n, d, CountMethod::Auto).unwrap();
                    assert_eq!((c.k, c.l), (b.k[n as usize], b.l[n as usize]));
                }
            }
        }
    }

    #[test]
    fn totals() {
        // every 6-tuple lands somewhere
        for q in [8u64, 9, 27, 35, 36] {
            let t = count_table(q, 1, CountMethod::Histogram).unwrap();
            let phi = (1..=q).filter(|&u| gcd(u, q) == 1).count() as u128;
            assert_eq!(t.k.iter().sum::<u128>(), phi.pow(5));
            assert_eq!(t.l.iter().sum::<u128>(), q as u128 * phi.pow(5));
        }
    }

    #[test]
    fn closed_form_for_primes_two_mod_three() {
        // cubing permutes units: K counts 5-tuples of nonzero residues
        for p in [5u64, 11, 17, 23, 29, 41, 1013, 100_019] {
            let pm = (p - 1) as i128;
            for n in [0u64, 1, 2, p - 1] {
                let c = congruence_counts(p, n, 1, CountMethod::Auto).unwrap();
                let expect = (pm.pow(5) + 1) / p as i128 - i128::from(n == 0);
                assert_eq!(c.k as i128, expect, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn limits() {
        assert!(matches!(
            count_table(25, 1, CountMethod::Naive),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            count_table(HISTOGRAM_LIMIT + 1, 1, CountMethod::Histogram),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            congruence_counts(9, 0, 1, CountMethod::ClassAlgebra),
            Err(Error::Domain(_))
        ));
    }
}
