use crate::analytic::{int_range, ScaleParams};
use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::numeric::{ls_slope, KahanSum};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

/// Largest `X` for the six-variable counts (i) and (iii).
pub const SIX_VAR_LIMIT: u64 = 100_000_000;
/// Largest `X` for the eight-variable counts (ii) and (iv).
pub const EIGHT_VAR_LIMIT: u64 = 1_000_000;
/// Largest `X` for the loop oracle.
pub const MOMENT_NAIVE_LIMIT: u64 = 10_000;

/// The four mean values, as counts of solutions of the underlying equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Moment {
    /// `n1^3 + m1^3 + m2^3 = n2^3 + m3^3 + m4^3` over integers.
    I,
    /// `n1^3 + n2^3 + m1^3 + m2^3 = n3^3 + n4^3 + m3^3 + m4^3` over integers.
    Ii,
    /// As (i) over primes, each solution weighted by `Π log p`.
    Iii,
    /// As (ii) over primes, weighted.
    Iv,
}

impl Moment {
    pub fn name(self) -> &'static str {
        match self {
            Moment::I => "i",
            Moment::Ii => "ii",
            Moment::Iii => "iii",
            Moment::Iv => "iv",
        }
    }

    fn n_vars(self) -> usize {
        match self {
            Moment::I | Moment::Iii => 1,
            Moment::Ii | Moment::Iv => 2,
        }
    }

    fn primes_only(self) -> bool {
        matches!(self, Moment::Iii | Moment::Iv)
    }

    fn limit(self) -> u64 {
        match self.n_vars() {
            1 => SIX_VAR_LIMIT,
            _ => EIGHT_VAR_LIMIT,
        }
    }
}

impl std::str::FromStr for Moment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => Ok(Moment::I),
            "ii" => Ok(Moment::Ii),
            "iii" => Ok(Moment::Iii),
            "iv" => Ok(Moment::Iv),
            _ => Err(Error::Validation(format!("unknown moment '{s}', expected i, ii, iii or iv"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCount {
    pub which: Moment,
    pub x: u64,
    pub n_box: usize,
    pub m_box: usize,
    /// Number of solutions, or their total weight for (iii) and (iv).
    pub count: f64,
    /// Solutions where one side is a permutation of the other.
    pub diagonal: f64,
}

/// Box members with their weights: 1, or `log p` on primes.
fn box_members(lo: f64, primes_only: bool) -> Vec<(u64, f64)> {
    int_range(lo, 2.0 * lo)
        .filter(|&v| !primes_only || is_prime(v))
        .map(|v| (v, if primes_only { (v as f64).ln() } else { 1.0 }))
        .collect()
}

/// Weighted cube sums over ordered `k`-tuples.
fn tuple_sums(vals: &[(u64, f64)], k: usize) -> Vec<(u64, f64)> {
    let mut out = vec![(0u64, 1.0)];
    for _ in 0..k {
        out = out.iter().flat_map(|&(s, w)| vals.iter().map(move |&(v, wv)| (s + v.pow(3), w * wv))).collect();
    }
    out
}

/// Weight of the permutation-symmetric solutions of a `k`-by-`k` equation
/// on one variable class, `k <= 2`: `Σw^2`, or `2(Σw^2)^2 - Σw^4`.
fn diagonal_factor(vals: &[(u64, f64)], k: usize) -> f64 {
    let s2: f64 = vals.iter().map(|v| v.1 * v.1).sum();
    match k {
        1 => s2,
        _ => 2.0 * s2 * s2 - vals.iter().map(|v| v.1.powi(4)).sum::<f64>(),
    }
}

fn boxes(which: Moment, x: u64) -> Result<(Vec<(u64, f64)>, Vec<(u64, f64)>)> {
    if x > which.limit() {
        return Err(Error::Capacity(format!("moment ({}) is capped at X = {}", which.name(), which.limit())));
    }
    if x < 8 {
        return Err(Error::Domain(format!("X = {x} is too small")));
    }
    let p = ScaleParams::desk(x);
    Ok((box_members(p.u3, which.primes_only()), box_members(p.u3_star, which.primes_only())))
}

/// `Σ_v w(v)^2` where `w(v)` is the weight of one-side tuples with cube sum `v`.
pub fn moment_count(which: Moment, x: u64) -> Result<MomentCount> {
    let (ns, ms) = boxes(which, x)?;
    let k = which.n_vars();
    let left = tuple_sums(&ns, k);
    let right = tuple_sums(&ms, 2);
    let mut table: FxHashMap<u64, f64> = FxHashMap::default();
    table.reserve(left.len() * right.len());
    for &(a, wa) in &left {
        for &(b, wb) in &right {
            *table.entry(a + b).or_default() += wa * wb;
        }
    }
    let count = table.values().map(|w| w * w).collect::<KahanSum>().value();
    Ok(MomentCount {
        which,
        x,
        n_box: ns.len(),
        m_box: ms.len(),
        count,
        diagonal: diagonal_factor(&ns, k) * diagonal_factor(&ms, 2),
    })
}

/// Every variable looped independently; both sides compared directly.
pub fn moment_count_naive(which: Moment, x: u64) -> Result<f64> {
    if x > MOMENT_NAIVE_LIMIT {
        return Err(Error::Capacity(format!("loop oracle is capped at X = {MOMENT_NAIVE_LIMIT}")));
    }
    let (ns, ms) = boxes(which, x)?;
    let k = which.n_vars();
    let mut vars: Vec<&[(u64, f64)]> = vec![];
    for _ in 0..2 {
        vars.extend(std::iter::repeat_n(ns.as_slice(), k));
        vars.extend([ms.as_slice(), ms.as_slice()]);
    }
    let half = vars.len() / 2;
    let mut total = 0.0;
    let mut idx = vec![0usize; vars.len()];
    'outer: loop {
        let side = |r: std::ops::Range<usize>| r.map(|j| vars[j][idx[j]].0.pow(3)).sum::<u64>();
        if side(0..half) == side(half..vars.len()) {
            total += (0..vars.len()).map(|j| vars[j][idx[j]].1).product::<f64>();
        }
        for j in (0..vars.len()).rev() {
            idx[j] += 1;
            if idx[j] < vars[j].len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentFit {
    pub which: Moment,
    pub rows: Vec<MomentCount>,
    /// Least-squares slope of `log count` against `log X`.
    pub exponent: f64,
    pub diagonal_ok: bool,
}

pub fn moment_exponent(which: Moment, xs: &[u64]) -> Result<MomentFit> {
    if xs.len() < 2 {
        return Err(Error::Domain("need at least two scales".into()));
    }
    let rows = xs.iter().map(|&x| moment_count(which, x)).collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = rows.iter().map(|r| (r.x as f64).ln()).collect();
    let lc: Vec<f64> = rows.iter().map(|r| r.count.ln()).collect();
    let diagonal_ok = rows.iter().all(|r| r.count >= r.diagonal * (1.0 - 1e-12));
    Ok(MomentFit { which, exponent: ls_slope(&lx, &lc), rows, diagonal_ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_equals_loops() {
        for which in [Moment::I, Moment::Ii, Moment::Iii, Moment::Iv] {
            for x in [1_000, 10_000] {
                let fast = moment_count(which, x).unwrap();
                let slow = moment_count_naive(which, x).unwrap();
                assert!((fast.count - slow).abs() <= 1e-9 * slow, "{which:?} at {x}");
                assert!(fast.count >= fast.diagonal * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn diagonal_is_exact_for_tiny_boxes() {
        // with one n and distinct m's only the trivial solutions remain
        let ns = vec![(10u64, 1.0)];
        let ms = vec![(3u64, 1.0), (4, 1.0)];
        assert_eq!(diagonal_factor(&ns, 1) * diagonal_factor(&ms, 2), 6.0);
    }

    #[test]
    fn caps() {
        assert!(matches!(moment_count(Moment::Ii, 2_000_000), Err(Error::Capacity(_))));
        assert!(matches!(moment_count(Moment::I, 200_000_000), Err(Error::Capacity(_))));
        assert!("v".parse::<Moment>().is_err());
        assert_eq!("iii".parse::<Moment>().unwrap(), Moment::Iii);
    }
}
