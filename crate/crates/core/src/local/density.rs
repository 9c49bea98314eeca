use super::counts::{congruence_counts, CountMethod};
use crate::arith::{factorize, primes_up_to, ExactRational};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

/// `ω(d)` as an exact rational.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaDensity {
    pub d: u64,
    pub value: ExactRational,
}

/// Where `ω(p)` comes from when forming sieve products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaSource {
    /// `ω ≡ 1`, the plain sieve of primes.
    Unit,
    /// `ω(p) = p 𝔎(p, N)/𝔏(p, N)` (and `9 𝔎(9, N)/𝔏(9, N)` at 3) for this `N`.
    Counts { n: u64 },
}

/// `(𝔎-side, 𝔏)` with `ω(p) = num/den`: `num = p 𝔎(p, N)` (`9 𝔎(9, N)` at 3).
pub(crate) fn omega_parts(p: u64, n: u64) -> Result<(u128, u128)> {
    let q = if p == 3 { 9 } else { p };
    let c = congruence_counts(q, n, 1, CountMethod::Auto)?;
    if c.l == 0 {
        return Err(Error::Consistency(format!("𝔏({q}, {n}) = 0; ω({p}) undefined")));
    }
    let mult = if p == 3 { 9 } else { p as u128 };
    Ok((mult * c.k, c.l))
}

/// `ω(p)` at a prime.
pub fn omega_prime(p: u64, n: u64) -> Result<ExactRational> {
    let (num, den) = omega_parts(p, n)?;
    Ok(ExactRational::new(BigInt::from(num), BigInt::from(den)))
}

/// `ω(d) = Π_{p | d} ω(p)` for squarefree `d`.
pub fn omega_density(d: u64, n: u64) -> Result<OmegaDensity> {
    let f = factorize(d)?;
    if !f.is_squarefree() {
        return Err(Error::Domain(format!("ω(d): d = {d} is not squarefree")));
    }
    let value = f
        .primes()
        .map(|p| omega_prime(p, n))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .product();
    Ok(OmegaDensity { d, value })
}

/// `1 - ω(p)/p` as an unreduced `(num, den)` pair.
fn sieve_factor(p: u64, source: OmegaSource) -> Result<(u128, u128)> {
    match source {
        OmegaSource::Unit => Ok(((p - 1) as u128, p as u128)),
        OmegaSource::Counts { n } => {
            let (num, den) = omega_parts(p, n)?;
            let pp = p as u128;
            Ok((pp * den - num, pp * den))
        }
    }
}

fn tree_product(xs: &[BigInt]) -> BigInt {
    match xs.len() {
        0 => BigInt::from(1),
        1 => xs[0].clone(),
        n => tree_product(&xs[..n / 2]) * tree_product(&xs[n / 2..]),
    }
}

/// `𝒱(z) = Π_{2 < p < z} (1 - ω(p)/p)`, accumulated exactly and converted
/// to a float at the end.
pub fn sifting_product_v(z: f64, source: OmegaSource) -> Result<f64> {
    if !(z >= 3.0) {
        return Err(Error::Domain(format!("𝒱(z): z = {z} < 3")));
    }
    let top = z.ceil() as u64 - 1;
    let primes: Vec<u64> = primes_up_to(top)
        .into_iter()
        .filter(|&p| p > 2 && (p as f64) < z)
        .collect();
    let parts: Vec<(u128, u128)> = primes
        .par_iter()
        .map(|&p| sieve_factor(p, source))
        .collect::<Result<_>>()?;
    let nums: Vec<BigInt> = parts.iter().map(|&(a, _)| BigInt::from(a)).collect();
    let dens: Vec<BigInt> = parts.iter().map(|&(_, b)| BigInt::from(b)).collect();
    let r = BigRational::new_raw(tree_product(&nums), tree_product(&dens));
    r.to_f64()
        .ok_or_else(|| Error::Precision("𝒱(z): conversion to f64 failed".into()))
}
