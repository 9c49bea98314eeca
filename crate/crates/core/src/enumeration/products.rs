use crate::analytic::ScaleParams;
use crate::arith::{factorize, primes_up_to};
use crate::error::{Error, Result};
use crate::sieve::{c_r_with_limit, DEFAULT_STEP};
use serde::{Deserialize, Serialize};

/// Default ceiling on depth-first search nodes.
pub const PRODUCT_NODE_BUDGET: u64 = 10_000_000;
/// Largest prime the search will sieve for.
pub const PRODUCT_PRIME_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProductKind {
    /// `z <= p1 <= .. <= pr`, product in `(U2, 2U2]`.
    #[serde(rename = "M")]
    M,
    /// `z <= p1 <= .. <= p_{r-1}` with `p1..p_{r-2} p_{r-1}^2 <= 2U2`.
    #[serde(rename = "N")]
    N,
}

/// Integer bounds for the product sets: primes `>= z_min`, products in
/// `(lo, hi]`. `u2` is kept as a real for the logarithmic weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductBounds {
    pub z: f64,
    pub z_min: u64,
    pub u2: f64,
    pub lo: u64,
    pub hi: u64,
}

impl ProductBounds {
    pub fn new(z: f64, u2: f64) -> Self {
        ProductBounds {
            z,
            z_min: z.ceil() as u64,
            u2,
            lo: u2.floor() as u64,
            hi: (2.0 * u2).floor() as u64,
        }
    }

    /// Exact integer bounds, for sizes where `f64` rounding matters.
    pub fn exact(z_min: u64, lo: u64) -> Self {
        ProductBounds { z: z_min as f64, z_min, u2: lo as f64, lo, hi: 2 * lo }
    }

    pub fn from_params(p: &ScaleParams) -> Self {
        Self::new(p.z, p.u2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductMember {
    pub value: u64,
    /// Nondecreasing prime factors.
    pub factors: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostPrimeProductSet {
    pub kind: ProductKind,
    pub r: u32,
    pub bounds: ProductBounds,
    pub members: Vec<ProductMember>,
    pub nodes: u64,
}

/// Ordered depth-first search over nondecreasing prime tuples.
pub fn enumerate_product_sets(kind: ProductKind, r: u32, bounds: ProductBounds, budget: u64) -> Result<AlmostPrimeProductSet> {
    if bounds.z < 3.0 {
        return Err(Error::Domain(format!("product sets need z >= 3, got {}", bounds.z)));
    }
    let len = match kind {
        ProductKind::M if r >= 1 => r as usize,
        ProductKind::N if r >= 2 => r as usize - 1,
        _ => return Err(Error::Domain(format!("r = {r} too small for {kind:?}"))),
    };
    let hi = bounds.hi as u128;
    let zmin = bounds.z_min as u128;
    // largest usable prime: the last factor, with all earlier ones at z
    let last_cap = match kind {
        ProductKind::M => hi / zmin.saturating_pow(len as u32 - 1),
        ProductKind::N => {
            let rest = hi / zmin.saturating_pow(len as u32 - 1);
            (rest as f64).sqrt().floor() as u128 + 1
        }
    };
    if last_cap > PRODUCT_PRIME_LIMIT as u128 {
        return Err(Error::Capacity(format!("product search needs primes up to {last_cap}")));
    }
    let primes: Vec<u64> = primes_up_to(last_cap as u64).into_iter().filter(|&p| p >= bounds.z_min).collect();
    let mut state = Search { kind, len, hi, lo: bounds.lo as u128, primes: &primes, budget, nodes: 0, stack: vec![], out: vec![] };
    state.walk(0, 1)?;
    let mut members = state.out;
    members.sort_unstable_by_key(|m| m.value);
    Ok(AlmostPrimeProductSet { kind, r, bounds, members, nodes: state.nodes })
}

struct Search<'a> {
    kind: ProductKind,
    len: usize,
    hi: u128,
    lo: u128,
    primes: &'a [u64],
    budget: u64,
    nodes: u64,
    stack: Vec<u64>,
    out: Vec<ProductMember>,
}

impl Search<'_> {
    fn walk(&mut self, from: usize, prod: u128) -> Result<()> {
        let depth = self.stack.len();
        if depth == self.len {
            let keep = match self.kind {
                ProductKind::M => prod > self.lo,
                ProductKind::N => true,
            };
            if keep {
                self.out.push(ProductMember { value: prod as u64, factors: self.stack.clone() });
            }
            return Ok(());
        }
        // remaining factors are all >= p; 𝒩 counts the last one twice
        let remaining = (self.len - depth) as u32 + u32::from(self.kind == ProductKind::N);
        for i in from..self.primes.len() {
            let p = self.primes[i] as u128;
            match p.checked_pow(remaining) {
                Some(v) if prod * v <= self.hi => {}
                _ => break,
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::Capacity(format!("product search exceeded {} nodes", self.budget)));
            }
            self.stack.push(p as u64);
            self.walk(i, prod * p)?;
            self.stack.pop();
        }
        Ok(())
    }
}

/// Whether `l` belongs to `𝒩_r`, decided from its factorization alone.
pub fn in_n_set(l: u64, r: u32, bounds: &ProductBounds) -> Result<bool> {
    if r < 2 || l < 2 {
        return Ok(false);
    }
    let f = factorize(l)?;
    let smallest = f.factors[0].0;
    let largest = f.factors.last().unwrap().0;
    Ok(f.big_omega() == r - 1 && smallest >= bounds.z_min && (l as u128) * (largest as u128) <= bounds.hi as u128)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrEmpirical {
    pub r: u32,
    pub z: f64,
    pub u2: f64,
    pub members: usize,
    /// `log U2 · Σ_{ℓ ∈ 𝒩_r} 1/(ℓ log(U2/ℓ))`.
    pub value: f64,
    /// `log U2 / log z - 1`, the outer limit of the matching integral.
    pub limit: f64,
    pub integral: f64,
    pub ratio: Option<f64>,
}

/// The empirical sum over `𝒩_r` next to the iterated integral with the
/// matching outer limit. With `L = log U2 / log z` the continuous analogue
/// of the sum is the `c_r` integral with 35 replaced by `L - 1`.
pub fn c_r_empirical(r: u32, bounds: ProductBounds, budget: u64) -> Result<CrEmpirical> {
    if bounds.z <= 2.0 {
        return Err(Error::Domain(format!("z = {} must exceed 2", bounds.z)));
    }
    let set = enumerate_product_sets(ProductKind::N, r, bounds, budget)?;
    let lu = bounds.u2.ln();
    let value = lu * set.members.iter().map(|m| 1.0 / (m.value as f64 * (bounds.u2 / m.value as f64).ln())).sum::<f64>();
    let limit = lu / bounds.z.ln() - 1.0;
    let integral = if r >= 4 { c_r_with_limit(r, limit, DEFAULT_STEP)?.value } else { f64::NAN };
    let ratio = (integral > 0.0).then(|| value / integral);
    Ok(CrEmpirical { r, z: bounds.z, u2: bounds.u2, members: set.members.len(), value, limit, integral, ratio })
}
