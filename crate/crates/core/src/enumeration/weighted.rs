use super::products::{enumerate_product_sets, in_n_set, ProductBounds, ProductKind, PRODUCT_NODE_BUDGET};
use super::reps::{box_representations, find_representations_with, Counting, RangeMode, RepresentationRecord};
use crate::analytic::{int_range, ScaleParams};
use crate::arith::{factorize, isqrt, primes_up_to};
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

/// Which variable of `J_r` carries the divisibility condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum JrReading {
    /// Restrict the five-prime records: `x = ℓp` with `d | x`, weight
    /// `log p / log(U2/ℓ) · Π_{j>=2} log p_j`.
    #[default]
    SquareVariable,
    /// Replace `p1` by an integer `m ∈ (U3, 2U3]` with `d | m` and no log
    /// factor; `x = ℓp` ranges over the square box.
    CubeVariable,
}

fn check_params(p: &ScaleParams) -> Result<()> {
    if p.u2 < 1.0 || p.u3 < 1.0 || p.u3_star < 1.0 {
        return Err(Error::Domain("boxes are empty at these parameters".into()));
    }
    Ok(())
}

fn sum_records<'a>(recs: impl Iterator<Item = &'a RepresentationRecord>, d: u64, counting: Counting) -> f64 {
    recs.filter(|r| r.x % d == 0)
        .map(|r| r.weight(counting) as f64 * r.log_weight())
        .collect::<KahanSum>()
        .value()
}

/// `J(N, d)`: `Π log p_j` over box solutions with `d | x`.
pub fn weighted_j(n: u64, d: u64, params: &ScaleParams, counting: Counting) -> Result<f64> {
    check_params(params)?;
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    if int_range(params.u2, 2.0 * params.u2).all(|x| x % d != 0) {
        return Ok(0.0);
    }
    let recs = find_representations_with(n, RangeMode::PaperRange, None, params)?;
    Ok(sum_records(recs.iter(), d, counting))
}

/// `J(N, d)` from the direct box loops.
pub fn weighted_j_naive(n: u64, d: u64, params: &ScaleParams, counting: Counting) -> Result<f64> {
    let recs = box_representations(n, None, params)?;
    Ok(sum_records(recs.iter(), d, counting))
}

/// `x ↦ Σ log p / log(U2/ℓ)` over the ways to write `x = ℓp`, `ℓ ∈ 𝒩_r`,
/// `x ∈ (U2, 2U2]`, built from the enumerated set.
pub fn square_weights(r: u32, params: &ScaleParams) -> Result<FxHashMap<u64, f64>> {
    let bounds = ProductBounds::from_params(params);
    let set = enumerate_product_sets(ProductKind::N, r, bounds, PRODUCT_NODE_BUDGET)?;
    let xs = int_range(params.u2, 2.0 * params.u2);
    let primes = if xs.is_empty() { vec![] } else { primes_up_to(*xs.end()) };
    let mut w: FxHashMap<u64, f64> = FxHashMap::default();
    for l in set.members.iter().map(|m| m.value) {
        let denom = (params.u2 / l as f64).ln();
        let start = primes.partition_point(|&p| p * l <= *xs.start() - 1);
        for &p in &primes[start..] {
            let x = p * l;
            if x > *xs.end() {
                break;
            }
            *w.entry(x).or_default() += (p as f64).ln() / denom;
        }
    }
    Ok(w)
}

/// The same weight for a single `x`, from its factorization.
pub fn square_weight_direct(x: u64, r: u32, params: &ScaleParams) -> Result<f64> {
    let bounds = ProductBounds::from_params(params);
    let f = factorize(x)?;
    let mut total = 0.0;
    for p in f.primes() {
        let l = x / p;
        if in_n_set(l, r, &bounds)? {
            total += (p as f64).ln() / (params.u2 / l as f64).ln();
        }
    }
    Ok(total)
}

/// `J_r(N, d)` under the chosen reading.
pub fn weighted_j_r(n: u64, d: u64, r: u32, params: &ScaleParams, reading: JrReading, counting: Counting) -> Result<f64> {
    check_params(params)?;
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    let w = square_weights(r, params)?;
    match reading {
        JrReading::SquareVariable => {
            let recs = find_representations_with(n, RangeMode::PaperRange, None, params)?;
            Ok(recs
                .iter()
                .filter(|rec| rec.x % d == 0)
                .filter_map(|rec| {
                    let wx = *w.get(&rec.x)?;
                    let rest: f64 = rec.primes[1..].iter().map(|&p| (p as f64).ln()).product();
                    Some(rec.weight(counting) as f64 * wx * rest)
                })
                .collect::<KahanSum>()
                .value())
        }
        JrReading::CubeVariable => cube_reading(n, d, params, &w, counting),
    }
}

fn box_primes(lo: f64) -> Vec<u64> {
    let r = int_range(lo, 2.0 * lo);
    if r.is_empty() {
        return vec![];
    }
    primes_up_to(*r.end()).into_iter().filter(|p| r.contains(p)).collect()
}

fn sorted_pairs(ps: &[u64], counting: Counting) -> Vec<(u128, f64)> {
    let mut out = vec![];
    for i in 0..ps.len() {
        for j in i..ps.len() {
            let mult = if counting == Counting::Ordered && i != j { 2.0 } else { 1.0 };
            let c = (ps[i] as u128).pow(3) + (ps[j] as u128).pow(3);
            out.push((c, mult * (ps[i] as f64).ln() * (ps[j] as f64).ln()));
        }
    }
    out
}

fn cube_reading(n: u64, d: u64, params: &ScaleParams, w: &FxHashMap<u64, f64>, counting: Counting) -> Result<f64> {
    let big = sorted_pairs(&box_primes(params.u3), counting);
    let small = sorted_pairs(&box_primes(params.u3_star), counting);
    let mut total = KahanSum::new();
    for m in int_range(params.u3, 2.0 * params.u3).filter(|m| m % d == 0) {
        let m3 = (m as u128).pow(3);
        for &(c1, w1) in &big {
            for &(c2, w2) in &small {
                let s = m3 + c1 + c2;
                if s >= n as u128 {
                    continue;
                }
                let rest = n - s as u64;
                let x = isqrt(rest);
                if x * x == rest {
                    if let Some(&wx) = w.get(&x) {
                        total.add(wx * w1 * w2);
                    }
                }
            }
        }
    }
    Ok(total.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> ScaleParams {
        ScaleParams::desk(100_000_000).with("z", 5.0).unwrap()
    }

    #[test]
    fn j_matches_box_loops() {
        let n = 100_000_000;
        let p = ScaleParams::desk(n);
        for d in [1, 2, 3, 6] {
            for c in [Counting::Sorted, Counting::Ordered] {
                let a = weighted_j(n, d, &p, c).unwrap();
                let b = weighted_j_naive(n, d, &p, c).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "d = {d}");
            }
        }
        let all = find_representations_with(n, RangeMode::PaperRange, None, &p).unwrap();
        let direct: f64 = all.iter().map(|r| r.log_weight()).sum();
        assert!((weighted_j(n, 1, &p, Counting::Sorted).unwrap() - direct).abs() < 1e-6 * direct);
        assert!(direct > 0.0);
    }

    #[test]
    fn j_vanishes_without_multiples() {
        let n = 100_000_000;
        let p = ScaleParams::desk(n);
        let d = 2 * (2.0 * p.u2) as u64 + 1;
        assert_eq!(weighted_j(n, d, &p, Counting::Sorted).unwrap(), 0.0);
        assert!(weighted_j(n, 0, &p, Counting::Sorted).is_err());
    }

    #[test]
    fn square_weights_agree_with_factorization() {
        let p = small_params();
        for r in 2..=4 {
            let w = square_weights(r, &p).unwrap();
            for x in int_range(p.u2, 2.0 * p.u2).step_by(7) {
                let a = w.get(&x).copied().unwrap_or(0.0);
                let b = square_weight_direct(x, r, &p).unwrap();
                assert!((a - b).abs() < 1e-12, "x = {x}, r = {r}");
            }
        }
    }

    #[test]
    fn j_r_readings() {
        let n = 100_000_000;
        let p = small_params();
        for r in 2..=4 {
            let sq = weighted_j_r(n, 1, r, &p, JrReading::SquareVariable, Counting::Sorted).unwrap();
            // direct from the records and the per-x weight
            let recs = find_representations_with(n, RangeMode::PaperRange, None, &p).unwrap();
            let direct: f64 = recs
                .iter()
                .map(|rec| {
                    let rest: f64 = rec.primes[1..].iter().map(|&q| (q as f64).ln()).product();
                    square_weight_direct(rec.x, r, &p).unwrap() * rest
                })
                .sum();
            assert!((sq - direct).abs() <= 1e-9 * direct.max(1.0));
            let cube = weighted_j_r(n, 1, r, &p, JrReading::CubeVariable, Counting::Ordered).unwrap();
            if r <= 3 {
                assert!(sq > 0.0 && cube > 0.0);
            }
        }
    }

    #[test]
    fn cube_reading_matches_loops() {
        let n = 100_000_000;
        let p = small_params();
        let r = 3;
        let w = square_weights(r, &p).unwrap();
        let d = 1;
        let fast = weighted_j_r(n, d, r, &p, JrReading::CubeVariable, Counting::Ordered).unwrap();
        // ordered loops over every variable
        let big = box_primes(p.u3);
        let small = box_primes(p.u3_star);
        let mut slow = 0.0;
        for m in int_range(p.u3, 2.0 * p.u3).filter(|m| m % d == 0) {
            for &p2 in &big {
                for &p3 in &big {
                    for &p4 in &small {
                        for &p5 in &small {
                            let s = m.pow(3) + p2.pow(3) + p3.pow(3) + p4.pow(3) + p5.pow(3);
                            if s >= n {
                                continue;
                            }
                            let x = isqrt(n - s);
                            if x * x == n - s {
                                let lw: f64 = [p2, p3, p4, p5].iter().map(|&q| (q as f64).ln()).product();
                                slow += w.get(&x).copied().unwrap_or(0.0) * lw;
                            }
                        }
                    }
                }
            }
        }
        assert!(slow > 0.0);
        assert!((fast - slow).abs() <= 1e-9 * slow);
    }
}
