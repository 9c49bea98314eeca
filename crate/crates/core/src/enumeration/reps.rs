use crate::analytic::{int_range, ScaleParams};
use crate::arith::{big_omega, is_prime, isqrt, icbrt, primes_up_to};
use crate::error::{Error, Result};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

/// Largest `N` accepted by the search engines.
pub const N_LIMIT: u64 = 10_000_000_000;
/// Largest `N` for the naive five-loop oracle.
pub const NAIVE_N_LIMIT: u64 = 100_000;
/// Ceiling on entries of the meet-in-the-middle table.
pub const TABLE_LIMIT: usize = 30_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeMode {
    /// Any `x >= 1` and any primes.
    Unrestricted,
    /// `x ∈ (U2, 2U2]`, `p1, p2, p3 ∈ (U3, 2U3]`, `p4, p5 ∈ (U3*, 2U3*]`.
    PaperRange,
}

/// How solutions are counted: one per sorted tuple, or one per ordering of
/// the primes within each group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Counting {
    #[default]
    Sorted,
    Ordered,
}

/// One solution of `N = x^2 + p1^3 + ... + p5^3`. In paper-range mode the
/// groups `(p1, p2, p3)` and `(p4, p5)` are each sorted; unrestricted
/// records have all five primes sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepresentationRecord {
    pub n: u64,
    pub x: u64,
    pub primes: [u64; 5],
    pub omega_x: u32,
    pub mode: RangeMode,
}

impl RepresentationRecord {
    /// Normalizes the ordering and re-verifies the identity exactly.
    pub fn new(n: u64, x: u64, mut primes: [u64; 5], mode: RangeMode, params: Option<&ScaleParams>) -> Result<Self> {
        match mode {
            RangeMode::Unrestricted => primes.sort_unstable(),
            RangeMode::PaperRange => {
                primes[..3].sort_unstable();
                primes[3..].sort_unstable();
            }
        }
        let total = x as u128 * x as u128 + primes.iter().map(|&p| (p as u128).pow(3)).sum::<u128>();
        if total != n as u128 || x == 0 {
            return Err(Error::Consistency(format!("{x}^2 + Σ p^3 != {n} for {primes:?}")));
        }
        if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::Consistency(format!("{p} is not prime")));
        }
        if mode == RangeMode::PaperRange {
            let p = params.ok_or_else(|| Error::Consistency("paper-range record without parameters".into()))?;
            let inside = |v: u64, lo: f64| (v as f64) > lo && (v as f64) <= 2.0 * lo;
            if !inside(x, p.u2) || !primes[..3].iter().all(|&q| inside(q, p.u3)) || !primes[3..].iter().all(|&q| inside(q, p.u3_star)) {
                return Err(Error::Consistency(format!("record ({x}, {primes:?}) leaves the boxes")));
            }
        }
        Ok(RepresentationRecord {
            n,
            x,
            primes,
            omega_x: if x == 1 { 0 } else { big_omega(x)? },
            mode,
        })
    }

    /// Number of ordered prime tuples this sorted record stands for.
    pub fn multiplicity(&self) -> u64 {
        match self.mode {
            RangeMode::Unrestricted => multinomial(&self.primes),
            RangeMode::PaperRange => multinomial(&self.primes[..3]) * multinomial(&self.primes[3..]),
        }
    }

    /// `Π log p_j`.
    pub fn log_weight(&self) -> f64 {
        self.primes.iter().map(|&p| (p as f64).ln()).product()
    }

    pub fn weight(&self, counting: Counting) -> u64 {
        match counting {
            Counting::Sorted => 1,
            Counting::Ordered => self.multiplicity(),
        }
    }
}

/// `k! / Π (run length)!` for a sorted slice.
fn multinomial(sorted: &[u64]) -> u64 {
    let fact = |k: usize| (1..=k as u64).product::<u64>();
    let mut denom = 1;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        denom *= fact(j);
        i += j;
    }
    fact(sorted.len()) / denom
}

fn check_n(n: u64) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::Domain(format!("N = {n} must be even")));
    }
    if n > N_LIMIT {
        return Err(Error::Capacity(format!("N = {n} exceeds {N_LIMIT}")));
    }
    Ok(())
}

/// Sorted values with a hash index from value to its run.
struct SumTable<T> {
    entries: Vec<(u64, T)>,
    index: FxHashMap<u64, (u32, u32)>,
}

impl<T: Copy> SumTable<T> {
    fn new(mut entries: Vec<(u64, T)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        let mut index = FxHashMap::default();
        let mut i = 0;
        while i < entries.len() {
            let v = entries[i].0;
            let j = entries[i..].iter().take_while(|e| e.0 == v).count();
            index.insert(v, (i as u32, j as u32));
            i += j;
        }
        SumTable { entries, index }
    }

    fn get(&self, v: u64) -> &[(u64, T)] {
        match self.index.get(&v) {
            Some(&(s, l)) => &self.entries[s as usize..(s + l) as usize],
            None => &[],
        }
    }
}

fn finish(mut out: Vec<RepresentationRecord>, max_omega: Option<u32>) -> Vec<RepresentationRecord> {
    if let Some(r) = max_omega {
        out.retain(|rec| rec.omega_x <= r);
    }
    out.sort_unstable();
    out
}

/// All representations of `N`, with paper-range boxes from desk parameters.
pub fn find_representations(n: u64, mode: RangeMode, max_omega: Option<u32>) -> Result<Vec<RepresentationRecord>> {
    find_representations_with(n, mode, max_omega, &ScaleParams::desk(n))
}

/// Meet-in-the-middle search.
///
/// Unrestricted: index `x^2 + q^3` over `x >= 1` and primes `q`, then scan
/// sorted prime quadruples `p1 <= .. <= p4` and look up the remainder,
/// keeping entries with `q >= p4`.
///
/// Paper range: index `x^2 + p4^3 + p5^3` over the square box and sorted
/// pairs from the small cube box, then scan sorted triples from the large
/// box.
pub fn find_representations_with(
    n: u64,
    mode: RangeMode,
    max_omega: Option<u32>,
    params: &ScaleParams,
) -> Result<Vec<RepresentationRecord>> {
    check_n(n)?;
    let out = match mode {
        RangeMode::Unrestricted => unrestricted_mitm(n)?,
        RangeMode::PaperRange => paper_mitm(n, params)?,
    };
    Ok(finish(out, max_omega))
}

fn unrestricted_mitm(n: u64) -> Result<Vec<RepresentationRecord>> {
    if n < 41 {
        return Ok(vec![]);
    }
    // four other cubes contribute at least 32
    let primes = primes_up_to(icbrt(n - 33));
    let xmax = isqrt(n - 40);
    if (xmax as usize).saturating_mul(primes.len()) > TABLE_LIMIT {
        return Err(Error::Capacity(format!("table for N = {n} would exceed {TABLE_LIMIT} entries")));
    }
    let cubes: Vec<u64> = primes.iter().map(|p| p * p * p).collect();
    let mut entries = Vec::new();
    for x in 1..=xmax {
        let xx = x * x;
        for (i, &c) in cubes.iter().enumerate() {
            if xx + c + 32 > n {
                break;
            }
            entries.push((xx + c, (x as u32, i as u32)));
        }
    }
    let table = SumTable::new(entries);
    let mut out = vec![];
    let k = cubes.len();
    for a in 0..k {
        let s1 = cubes[a];
        if s1 * 4 + 8 > n {
            break;
        }
        for b in a..k {
            let s2 = s1 + cubes[b];
            if s2 + 2 * cubes[b] + 9 > n {
                break;
            }
            for c in b..k {
                let s3 = s2 + cubes[c];
                if s3 + cubes[c] + 9 > n {
                    break;
                }
                for d in c..k {
                    let s4 = s3 + cubes[d];
                    if s4 + cubes[d] + 1 > n {
                        break;
                    }
                    for &(_, (x, qi)) in table.get(n - s4) {
                        if (qi as usize) >= d {
                            let ps = [primes[a], primes[b], primes[c], primes[d], primes[qi as usize]];
                            out.push(RepresentationRecord::new(n, x as u64, ps, RangeMode::Unrestricted, None)?);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn box_primes(lo: f64) -> Vec<u64> {
    let r = int_range(lo, 2.0 * lo);
    if r.is_empty() {
        return vec![];
    }
    primes_up_to(*r.end()).into_iter().filter(|p| r.contains(p)).collect()
}

fn paper_mitm(n: u64, params: &ScaleParams) -> Result<Vec<RepresentationRecord>> {
    let big = box_primes(params.u3);
    let small = box_primes(params.u3_star);
    let xs = int_range(params.u2, 2.0 * params.u2);
    let pairs = small.len() * (small.len() + 1) / 2;
    if xs.clone().count().saturating_mul(pairs) > TABLE_LIMIT {
        return Err(Error::Capacity(format!("table for N = {n} would exceed {TABLE_LIMIT} entries")));
    }
    let mut entries = Vec::new();
    for x in xs {
        let xx = x as u128 * x as u128;
        for i in 0..small.len() {
            for j in i..small.len() {
                let v = xx + (small[i] as u128).pow(3) + (small[j] as u128).pow(3);
                if v < n as u128 {
                    entries.push((v as u64, (x as u32, i as u16, j as u16)));
                }
            }
        }
    }
    let table = SumTable::new(entries);
    let mut out = vec![];
    let cubes: Vec<u64> = big.iter().map(|p| p * p * p).collect();
    for a in 0..big.len() {
        for b in a..big.len() {
            for c in b..big.len() {
                let t = cubes[a] + cubes[b] + cubes[c];
                if t >= n {
                    break;
                }
                for &(_, (x, i, j)) in table.get(n - t) {
                    let ps = [big[a], big[b], big[c], small[i as usize], small[j as usize]];
                    out.push(RepresentationRecord::new(n, x as u64, ps, RangeMode::PaperRange, Some(params))?);
                }
            }
        }
    }
    Ok(out)
}

/// Five nested prime loops with an integer square root at the end.
pub fn naive_representations(n: u64, max_omega: Option<u32>) -> Result<Vec<RepresentationRecord>> {
    check_n(n)?;
    if n > NAIVE_N_LIMIT {
        return Err(Error::Capacity(format!("naive search is capped at N = {NAIVE_N_LIMIT}")));
    }
    let primes = primes_up_to(icbrt(n));
    let mut out = vec![];
    let mut stack = [0usize; 5];
    fn rec(
        primes: &[u64],
        depth: usize,
        from: usize,
        rest: u64,
        stack: &mut [usize; 5],
        n: u64,
        out: &mut Vec<RepresentationRecord>,
    ) -> Result<()> {
        if depth == 5 {
            let x = isqrt(rest);
            if x >= 1 && x * x == rest {
                let ps = stack.map(|i| primes[i]);
                out.push(RepresentationRecord::new(n, x, ps, RangeMode::Unrestricted, None)?);
            }
            return Ok(());
        }
        for i in from..primes.len() {
            let c = primes[i].pow(3);
            if c >= rest {
                break;
            }
            stack[depth] = i;
            rec(primes, depth + 1, i, rest - c, stack, n, out)?;
        }
        Ok(())
    }
    rec(&primes, 0, 0, n, &mut stack, n, &mut out)?;
    Ok(finish(out, max_omega))
}

/// Direct loops over the three boxes.
pub fn box_representations(n: u64, max_omega: Option<u32>, params: &ScaleParams) -> Result<Vec<RepresentationRecord>> {
    check_n(n)?;
    let big = box_primes(params.u3);
    let small = box_primes(params.u3_star);
    let mut out = vec![];
    for (a, &p1) in big.iter().enumerate() {
        for (b, &p2) in big.iter().enumerate().skip(a) {
            for &p3 in &big[b..] {
                for (d, &p4) in small.iter().enumerate() {
                    for &p5 in &small[d..] {
                        let s = [p1, p2, p3, p4, p5].iter().map(|&p| (p as u128).pow(3)).sum::<u128>();
                        if s >= n as u128 {
                            continue;
                        }
                        let rest = n - s as u64;
                        let x = isqrt(rest);
                        if x * x == rest && (x as f64) > params.u2 && (x as f64) <= 2.0 * params.u2 {
                            out.push(RepresentationRecord::new(n, x, [p1, p2, p3, p4, p5], RangeMode::PaperRange, Some(params))?);
                        }
                    }
                }
            }
        }
    }
    Ok(finish(out, max_omega))
}

/// `ℛ(N)` restricted to `Ω(x) <= r`.
pub fn r_count(n: u64, r: u32, mode: RangeMode, counting: Counting) -> Result<u64> {
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    Ok(find_representations(n, mode, Some(r))?.iter().map(|rec| rec.weight(counting)).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub n: u64,
    pub found: bool,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub lo: u64,
    pub hi: u64,
    pub r: u32,
    pub rows: Vec<VerifyRow>,
    pub failures: Vec<u64>,
}

/// For each even `N` in `[lo, hi]`, whether an unrestricted representation
/// with `Ω(x) <= r` exists.
pub fn verify_range(lo: u64, hi: u64, r: u32) -> Result<VerifySummary> {
    if lo > hi {
        return Err(Error::Domain(format!("empty interval: lo = {lo} > hi = {hi}")));
    }
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    if hi > N_LIMIT {
        return Err(Error::Capacity(format!("hi = {hi} exceeds {N_LIMIT}")));
    }
    let mut rows = vec![];
    let mut n = lo + lo % 2;
    while n <= hi {
        let count = find_representations(n, RangeMode::Unrestricted, Some(r))?.len();
        rows.push(VerifyRow { n, found: count > 0, count });
        n += 2;
    }
    let failures = rows.iter().filter(|r| !r.found).map(|r| r.n).collect();
    Ok(VerifySummary { lo, hi, r, rows, failures })
}
