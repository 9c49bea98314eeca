use crate::arith::{factorize, primes_up_to, ExactRational};
use crate::error::{Error, Result};
use crate::local::{sifting_product_v, OmegaSource};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::functions::{linear_sieve_big_f, linear_sieve_small_f};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SieveSign {
    Upper,
    Lower,
}

/// Whether the prefix `p1 > ... > pm` passes the Rosser condition at step
/// `m` (1-based): `p1⋯p_{m-1} p_m^3 <= D`, imposed at odd `m` for the upper
/// weights and at even `m` for the lower ones.
fn step_ok(sign: SieveSign, m: usize, prefix_before: f64, p: u64, d_level: f64) -> bool {
    let checked = match sign {
        SieveSign::Upper => m % 2 == 1,
        SieveSign::Lower => m % 2 == 0,
    };
    !checked || prefix_before * (p as f64).powi(3) <= d_level
}

/// `λ±(d)` for primes listed in decreasing order.
fn lambda_from_primes(desc: &[u64], sign: SieveSign, d_level: f64) -> i8 {
    let mut prefix = 1.0;
    for (i, &p) in desc.iter().enumerate() {
        if !step_ok(sign, i + 1, prefix, p, d_level) {
            return 0;
        }
        prefix *= p as f64;
    }
    if prefix > d_level {
        return 0;
    }
    if desc.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Rosser weight of level `D`: `μ(d)` when every prefix condition holds and
/// `d <= D`, else 0. Non-squarefree `d` gives 0.
pub fn rosser_lambda(d: u64, sign: SieveSign, d_level: f64) -> Result<i8> {
    if d == 0 {
        return Err(Error::Domain("λ(0) is undefined".into()));
    }
    if d as f64 > d_level {
        return Ok(0);
    }
    let f = factorize(d)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    let mut desc: Vec<u64> = f.primes().collect();
    desc.reverse();
    Ok(lambda_from_primes(&desc, sign, d_level))
}

/// Weights of level `D` on the sifting range `(2, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SieveWeightSet {
    pub d_level: f64,
    pub z: f64,
    pub sign: SieveSign,
}

impl SieveWeightSet {
    pub fn new(d_level: f64, z: f64, sign: SieveSign) -> Self {
        SieveWeightSet { d_level, z, sign }
    }

    /// `λ(d)`, zero outside the support `d | 𝔓(z)`.
    pub fn lambda(&self, d: u64) -> Result<i8> {
        if d == 0 {
            return Err(Error::Domain("λ(0) is undefined".into()));
        }
        let f = factorize(d)?;
        if f.primes().any(|p| p <= 2 || p as f64 >= self.z) {
            return Ok(0);
        }
        rosser_lambda(d, self.sign, self.d_level)
    }

    /// Every `d` with `λ(d) != 0`, ascending, found by depth-first search.
    pub fn support(&self, node_budget: usize) -> Result<Vec<(u64, i8)>> {
        let primes = sifting_primes(self.z);
        let mut out = vec![];
        let mut nodes = 0;
        walk(&primes, self.sign, self.d_level, node_budget, &mut nodes, &mut |desc, lam| {
            out.push((desc.iter().product(), lam));
        })?;
        out.sort_unstable();
        Ok(out)
    }
}

fn sifting_primes(z: f64) -> Vec<u64> {
    if z <= 3.0 {
        return vec![];
    }
    primes_up_to(z.ceil() as u64)
        .into_iter()
        .filter(|&p| p > 2 && (p as f64) < z)
        .collect()
}

/// Visits every `d | 𝔓(z)` with `λ(d) != 0`, primes chosen in decreasing
/// order so that failed prefix conditions prune whole subtrees.
fn walk(
    primes: &[u64],
    sign: SieveSign,
    d_level: f64,
    budget: usize,
    nodes: &mut usize,
    visit: &mut dyn FnMut(&[u64], i8),
) -> Result<()> {
    fn rec(
        primes: &[u64],
        upto: usize,
        stack: &mut Vec<u64>,
        prefix: f64,
        ctx: &mut (SieveSign, f64, usize, &mut usize, &mut dyn FnMut(&[u64], i8)),
    ) -> Result<()> {
        *ctx.3 += 1;
        if *ctx.3 > ctx.2 {
            return Err(Error::Capacity(format!("sieve traversal exceeded {} nodes", ctx.2)));
        }
        let lam = if stack.len() % 2 == 0 { 1 } else { -1 };
        (ctx.4)(stack, lam);
        for i in (0..upto).rev() {
            let p = primes[i];
            if prefix * p as f64 > ctx.1 {
                continue;
            }
            if !step_ok(ctx.0, stack.len() + 1, prefix, p, ctx.1) {
                // smaller primes may still pass
                continue;
            }
            stack.push(p);
            rec(primes, i, stack, prefix * p as f64, ctx)?;
            stack.pop();
        }
        Ok(())
    }
    let mut stack = vec![];
    let mut ctx = (sign, d_level, budget, nodes, visit);
    rec(primes, primes.len(), &mut stack, 1.0, &mut ctx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub m_max: u64,
    pub z: f64,
    pub d_level: f64,
    pub checked: u64,
    /// `m` for which `Σλ⁻ <= [(m, 𝔓) = 1] <= Σλ⁺` fails.
    pub violations: Vec<u64>,
}

/// Checks the sandwich inequality for every `m <= m_max`, reporting failures.
pub fn sandwich_report(m_max: u64, z: f64, d_level: f64) -> Result<SandwichReport> {
    let primes = sifting_primes(z);
    let mut cache: FxHashMap<u64, (i64, i64)> = FxHashMap::default();
    let mut violations = vec![];
    for m in 1..=m_max {
        let mut kernel: Vec<u64> = primes.iter().copied().filter(|&p| m % p == 0).collect();
        let key: u64 = kernel.iter().product();
        let sums = match cache.get(&key) {
            Some(&s) => s,
            None => {
                kernel.reverse();
                let s = divisor_lambda_sums(&kernel, d_level);
                cache.insert(key, s);
                s
            }
        };
        let ind = i64::from(key == 1);
        if !(sums.1 <= ind && ind <= sums.0) {
            violations.push(m);
        }
    }
    Ok(SandwichReport {
        m_max,
        z,
        d_level,
        checked: m_max,
        violations,
    })
}

/// `(Σ_{d | k} λ⁺(d), Σ_{d | k} λ⁻(d))` for the squarefree `k` with the given
/// prime factors in decreasing order.
fn divisor_lambda_sums(desc: &[u64], d_level: f64) -> (i64, i64) {
    let (mut up, mut lo) = (0i64, 0i64);
    let mut sub = vec![];
    for mask in 0u32..(1 << desc.len()) {
        sub.clear();
        sub.extend(desc.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p));
        up += lambda_from_primes(&sub, SieveSign::Upper, d_level) as i64;
        lo += lambda_from_primes(&sub, SieveSign::Lower, d_level) as i64;
    }
    (up, lo)
}

/// As [`sandwich_report`], failing with a property error on any violation.
pub fn sandwich_verify(m_max: u64, z: f64, d_level: f64) -> Result<SandwichReport> {
    let r = sandwich_report(m_max, z, d_level)?;
    if !r.violations.is_empty() {
        return Err(Error::Property(format!(
            "sandwich fails for {} values of m, first {}",
            r.violations.len(),
            r.violations[0]
        )));
    }
    Ok(r)
}

pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveSumValue {
    pub sign: SieveSign,
    pub d_level: f64,
    pub z: f64,
    /// `Σ_{d | 𝔓} λ(d) ω(d)/d`, exact.
    pub exact: ExactRational,
    pub value: f64,
    pub nodes: usize,
    /// `𝒱(z)`
    pub v_z: f64,
    pub s: f64,
    /// `𝒱(z) F(s)` or `𝒱(z) f(s)` when `s` lies where the closed form holds.
    pub main_term: Option<f64>,
    pub ratio: Option<f64>,
}

/// `Σ_{d | 𝔓} λ±(d) ω(d)/d`, with `ω` from `source`, compared with
/// `𝒱(z) F(s)` (upper) or `𝒱(z) f(s)` (lower) at `s = log D / log z`.
pub fn sieve_sum(sign: SieveSign, d_level: f64, z: f64, source: OmegaSource, node_budget: usize) -> Result<SieveSumValue> {
    if !(z > 2.0) {
        return Err(Error::Domain(format!("sieve sum needs z > 2, got {z}")));
    }
    let primes = sifting_primes(z);
    // ω(p)/p = num/den per prime
    let mut ratio_of: FxHashMap<u64, (BigInt, BigInt)> = FxHashMap::default();
    for &p in &primes {
        let (num, den) = match source {
            OmegaSource::Unit => (1u128, p as u128),
            OmegaSource::Counts { n } => {
                let (k, l) = crate::local::density::omega_parts(p, n)?;
                (k, l * p as u128)
            }
        };
        ratio_of.insert(p, (BigInt::from(num), BigInt::from(den)));
    }
    let mut total = BigRational::zero();
    let mut nodes = 0;
    walk(&primes, sign, d_level, node_budget, &mut nodes, &mut |desc, lam| {
        let (mut n, mut d) = (BigInt::from(lam), BigInt::from(1));
        for p in desc {
            let (a, b) = &ratio_of[p];
            n *= a;
            d *= b;
        }
        if !n.is_zero() {
            total += BigRational::new(n, d);
        }
    })?;
    let value = total.to_f64().unwrap_or(f64::NAN);
    let v_z = if z >= 3.0 { sifting_product_v(z, source)? } else { 1.0 };
    let s = d_level.ln() / z.ln();
    let main = match sign {
        SieveSign::Upper => linear_sieve_big_f(s).ok(),
        SieveSign::Lower => linear_sieve_small_f(s).ok(),
    }
    .map(|f| v_z * f);
    Ok(SieveSumValue {
        sign,
        d_level,
        z,
        exact: ExactRational(total),
        value,
        nodes,
        v_z,
        s,
        main_term: main,
        ratio: main.map(|m| value / m),
    })
}
