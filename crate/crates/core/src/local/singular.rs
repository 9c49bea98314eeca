use super::counts::{congruence_counts, CountMethod};
use super::factor::{b_complex_sum, SumEngine};
use crate::arith::{gcd, mult_functions, primes_up_to};
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSeriesOptions {
    /// Composite moduli up to this bound are summed directly in the
    /// direct-sum route; beyond it their terms come from multiplicativity.
    pub direct_limit: u64,
    /// Primes up to this bound get their local factor from complex
    /// summation in the direct-sum route; larger primes from exact counts.
    pub complex_prime_limit: u64,
    /// Subtrees whose total absolute contribution is below this are cut.
    pub prune_tol: f64,
    /// Allowed relative gap between the two routes.
    pub tolerance: f64,
}

impl Default for SingularSeriesOptions {
    fn default() -> Self {
        Self {
            direct_limit: 1000,
            complex_prime_limit: 10_000,
            prune_tol: 1e-15,
            tolerance: 1e-9,
        }
    }
}

/// Truncated `𝔖_d(N) = Σ_q A_d(q, N)` over moduli built from primes `<= P`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSeriesValue {
    pub n: u64,
    pub d: u64,
    pub cutoff: u64,
    /// Euler product over `p <= P` from exact counts.
    pub value: f64,
    /// Direct sum of `A_d(q, N)` over admissible `q`.
    pub direct_value: f64,
    pub relative_gap: f64,
    /// `|Π_{P/10 < p <= P} (1 + A_d(p, N)) - 1|`, a proxy for the neglected tail.
    pub tail_estimate: f64,
    /// Bound on the absolute mass cut from the direct-sum traversal.
    pub pruned_bound: f64,
    /// Moduli visited by the direct-sum traversal.
    pub terms: usize,
}

/// Moduli carrying a nonzero local factor at `p`: `p` itself, and `3, 9` at
/// `p = 3`. Higher powers vanish because `S*_3(p^l, a) = 0` from
/// `l = γ(p)` on.
fn allowed_powers(p: u64) -> &'static [u32] {
    if p == 3 {
        &[1, 2]
    } else {
        &[1]
    }
}

/// The exact Euler factor at `p`: `𝔏_d(p, N)/(p-1)^5`, or `𝔏_d(9, N)/6^5`
/// at `p = 3`, as `(numerator, denominator)`.
pub fn euler_factor(p: u64, n: u64, d: u64) -> Result<(u128, u128)> {
    let q = if p == 3 { 9 } else { p };
    let c = congruence_counts(q, n, d, CountMethod::Auto)?;
    let phi = if p == 3 { 6u128 } else { (p - 1) as u128 };
    Ok((c.l, phi.pow(5)))
}

struct PrimeData {
    p: u64,
    euler: f64,
    /// `A_d(p^e, N)` for each allowed exponent.
    a: Vec<f64>,
}

fn prime_data(p: u64, n: u64, d: u64, opts: &SingularSeriesOptions) -> Result<PrimeData> {
    let (num, den) = euler_factor(p, n, d)?;
    let euler = num as f64 / den as f64;
    let a = allowed_powers(p)
        .iter()
        .map(|&e| {
            let q = p.pow(e);
            let phi = mult_functions(q, &[])?.phi as f64;
            if p <= opts.complex_prime_limit {
                let raw = b_complex_sum(q, n, d, SumEngine::Fft)?;
                Ok(raw.re / (q as f64 * phi.powi(5)))
            } else {
                // B = p 𝔏 - p (p-1)^5, exact in i128 for p below ~10^6
                let b = p as i128 * num as i128 - p as i128 * den as i128;
                Ok(b as f64 / (q as f64 * phi.powi(5)))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PrimeData { p, euler, a })
}

pub fn singular_series(n: u64, d: u64, cutoff: u64) -> Result<SingularSeriesValue> {
    singular_series_with(n, d, cutoff, &SingularSeriesOptions::default())
}

pub fn singular_series_with(
    n: u64,
    d: u64,
    cutoff: u64,
    opts: &SingularSeriesOptions,
) -> Result<SingularSeriesValue> {
    if n % 2 != 0 {
        return Err(Error::Domain(format!("singular series: N = {n} must be even")));
    }
    if cutoff < 5 {
        return Err(Error::Domain(format!("singular series: cutoff {cutoff} < 5")));
    }
    if d == 0 {
        return Err(Error::Domain("singular series: d must be >= 1".into()));
    }
    let primes = primes_up_to(cutoff);
    let data: Vec<PrimeData> = primes
        .par_iter()
        .map(|&p| prime_data(p, n, d, opts))
        .collect::<Result<_>>()?;

    let value: f64 = data.iter().map(|x| x.euler).product();
    let tail_estimate = (data
        .iter()
        .filter(|x| x.p * 10 > cutoff)
        .map(|x| x.euler)
        .product::<f64>()
        - 1.0)
        .abs();

    let (direct_value, pruned_bound, terms) = direct_sum(n, d, &data, opts)?;
    let relative_gap = if value != 0.0 {
        ((direct_value - value) / value).abs()
    } else {
        (direct_value - value).abs()
    };
    if relative_gap > opts.tolerance {
        return Err(Error::Consistency(format!(
            "singular series N={n} d={d} P={cutoff}: product {value} vs direct sum \
             {direct_value} (relative gap {relative_gap:e})"
        )));
    }
    Ok(SingularSeriesValue {
        n,
        d,
        cutoff,
        value,
        direct_value,
        relative_gap,
        tail_estimate,
        pruned_bound,
        terms,
    })
}

/// Depth-first expansion of `Σ_q A_d(q, N)` over `q` built from increasing
/// prime powers. A subtree whose total mass is provably below
/// `prune_tol` is skipped and its bound recorded.
fn direct_sum(n: u64, d: u64, data: &[PrimeData], opts: &SingularSeriesOptions) -> Result<(f64, f64, usize)> {
    // tails[j] = Π_{k >= j} (1 + Σ_e |A(p_k^e)|) - 1
    let mut tails = vec![0.0f64; data.len() + 1];
    for j in (0..data.len()).rev() {
        let s: f64 = data[j].a.iter().map(|x| x.abs()).sum();
        tails[j] = (1.0 + tails[j + 1]) * (1.0 + s) - 1.0;
    }
    let mut sum = KahanSum::new();
    sum.add(1.0);
    let mut pruned = 0.0;
    let mut terms = 1usize;
    // (next prime index, q, whether q has several prime factors, A(q))
    let mut stack: Vec<(usize, u64, usize, f64)> = vec![(0, 1, 0, 1.0)];
    while let Some((start, q, nprimes, aq)) = stack.pop() {
        for j in start..data.len() {
            let rest = aq.abs() * tails[j];
            if rest < opts.prune_tol {
                pruned += rest;
                break;
            }
            let pd = &data[j];
            for (i, &e) in allowed_powers(pd.p).iter().enumerate() {
                let pe = pd.p.pow(e);
                let child_q = q.checked_mul(pe);
                let child_a = match child_q {
                    Some(cq) if nprimes >= 1 && cq <= opts.direct_limit => {
                        debug_assert_eq!(gcd(q, pe), 1);
                        let raw = b_complex_sum(cq, n, d, SumEngine::Fft)?;
                        let phi = mult_functions(cq, &[])?.phi as f64;
                        raw.re / (cq as f64 * phi.powi(5))
                    }
                    _ => aq * pd.a[i],
                };
                sum.add(child_a);
                terms += 1;
                stack.push((j + 1, child_q.unwrap_or(u64::MAX), nprimes + 1, child_a));
            }
        }
    }
    Ok((sum.value(), pruned, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_near_ten_thousand() {
        for n in (10_000..=10_020).step_by(2) {
            let s = singular_series(n, 1, 200).unwrap();
            assert!(s.value > 0.0 && s.direct_value > 0.0, "N={n}");
        }
    }

    #[test]
    fn two_routes_agree_at_cutoff_1000() {
        let s = singular_series(1_000_000, 1, 1000).unwrap();
        assert!(s.relative_gap < 1e-9, "{s:?}");
        assert!(s.pruned_bound < 1e-10, "{s:?}");
    }

    #[test]
    fn even_d_kills_the_series() {
        let s = singular_series(10_000, 2, 100).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.direct_value.abs() < 1e-9);
    }

    #[test]
    fn ratio_at_five_is_omega() {
        let n = 1_000_000u64; // divisible by 5
        let s1 = singular_series(n, 1, 300).unwrap();
        let s5 = singular_series(n, 5, 300).unwrap();
        assert!((s5.value / s1.value - 1020.0 / 1024.0).abs() < 1e-12);
        assert!((s5.direct_value / s1.direct_value - 1020.0 / 1024.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(singular_series(11, 1, 100), Err(Error::Domain(_))));
        assert!(matches!(singular_series(10, 1, 3), Err(Error::Domain(_))));
    }
}
