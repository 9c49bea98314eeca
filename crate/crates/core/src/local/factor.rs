use super::counts::{congruence_counts, count_table, CountMethod, HISTOGRAM_LIMIT};
use super::dd::{e_dd, Cdd, Dd, DD_EPS};
use super::power_sum::{fft_error_bound, histogram_transform, power_histogram, POWER_SUM_LIMIT};
use crate::arith::{factorize, gcd, is_prime, mult_functions, ExactRational};
use crate::error::{Error, Result};
use crate::numeric::{e_frac, ComplexSum};
use num_bigint::BigInt;

/// Above this modulus the double-double route gets slow (`O(q^2)`) and the
/// FFT route in plain doubles takes over.
pub const DD_LIMIT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumEngine {
    #[default]
    Auto,
    /// Power sums by direct double-double summation against exact roots.
    DoubleDouble,
    /// Power-sum tables from one FFT each, accumulated in doubles.
    Fft,
}

/// Exact local data at one modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalData {
    pub q: u64,
    pub n_residue: u64,
    pub d: u64,
    /// `𝔎(q, N)` when a counting route was run.
    pub k: Option<u128>,
    /// `𝔏_d(q, N)` when a counting route was run.
    pub l: Option<u128>,
    pub b: i128,
    /// Unrounded real part of the complex sum.
    pub b_float: f64,
    pub b_error_bound: f64,
    pub a: ExactRational,
    pub engine: SumEngine,
}

/// Unrounded `B_d(q, N)` with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawSum {
    pub re: f64,
    pub im: f64,
    /// `re` as the nearest double-double, for rounding.
    pub re_dd: Dd,
    pub error_bound: f64,
}

fn phi(q: u64) -> u64 {
    mult_functions(q, &[]).map(|v| v.phi).unwrap_or(0)
}

/// `B_d(q, N) = Σ_{(a,q)=1} S_2(q, a d^2) S*_3(q, a)^5 e(-aN/q)` by complex
/// summation, without rounding.
pub fn b_complex_sum(q: u64, n: u64, d: u64, engine: SumEngine) -> Result<RawSum> {
    if q == 0 {
        return Err(Error::Domain("B_d(q, N): q must be >= 1".into()));
    }
    if q > POWER_SUM_LIMIT {
        return Err(Error::Capacity(format!(
            "B_d(q, N): q = {q} exceeds {POWER_SUM_LIMIT}"
        )));
    }
    let engine = match engine {
        SumEngine::Auto if q <= DD_LIMIT => SumEngine::DoubleDouble,
        SumEngine::Auto => SumEngine::Fft,
        e => e,
    };
    let hc = power_histogram(q, 3, true, 1);
    let hs = power_histogram(q, 2, false, d);
    let nr = n % q;
    match engine {
        SumEngine::DoubleDouble => Ok(dd_sum(q, nr, &hc, &hs)),
        _ => Ok(fft_sum(q, nr, &hc, &hs)),
    }
}

fn sparse(h: &[u64]) -> Vec<(u64, f64)> {
    h.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(r, &c)| (r as u64, c as f64))
        .collect()
}

fn dd_sum(q: u64, nr: u64, hc: &[u64], hs: &[u64]) -> RawSum {
    let roots: Vec<Cdd> = (0..q).map(|r| e_dd(r, q)).collect();
    let (sc, ss) = (sparse(hc), sparse(hs));
    let at = |a: u64, sp: &[(u64, f64)]| {
        sp.iter().fold(Cdd::ZERO, |acc, &(r, c)| {
            acc + roots[((a as u128 * r as u128) % q as u128) as usize].scale(c)
        })
    };
    let mut acc = Cdd::ZERO;
    let mut mass = 0.0;
    for a in (1..=q).filter(|&a| gcd(a, q) == 1) {
        let s3 = at(a, &sc);
        let s2 = at(a, &ss);
        let tw = roots[((q - (a as u128 * nr as u128 % q as u128) as u64) % q) as usize];
        let term = s2 * s3.powu(5) * tw;
        mass += term.norm();
        acc = acc + term;
    }
    RawSum {
        re: acc.re.to_f64(),
        im: acc.im.to_f64(),
        re_dd: acc.re,
        error_bound: 64.0 * (q as f64 + 16.0) * DD_EPS * mass.max(1.0),
    }
}

fn fft_sum(q: u64, nr: u64, hc: &[u64], hs: &[u64]) -> RawSum {
    let s3 = histogram_transform(hc);
    let s2 = histogram_transform(hs);
    let phi_q = hc.iter().sum::<u64>() as f64;
    let (d2, d3) = (fft_error_bound(q, q as f64), fft_error_bound(q, phi_q));
    let mut acc = ComplexSum::new();
    let mut bound = 0.0;
    let mut mass = 0.0;
    for a in (1..=q).filter(|&a| gcd(a, q) == 1) {
        let (x2, x3) = (s2[(a % q) as usize], s3[(a % q) as usize]);
        let tw = e_frac(-((a as i128 * nr as i128) % q as i128), q);
        let term = x2 * x3.powu(5) * tw;
        let (m2, m3) = (x2.norm(), x3.norm());
        bound += m3.powi(5) * d2 + 5.0 * (m2 + d2) * (m3 + d3).powi(4) * d3;
        mass += term.norm();
        acc.add(term);
    }
    let v = acc.value();
    RawSum {
        re: v.re,
        im: v.im,
        re_dd: Dd::from_f64(v.re),
        error_bound: bound + 32.0 * f64::EPSILON * mass,
    }
}

/// `B_d(q, N)` rounded to an integer after checking that the rounding is
/// certified, and `A_d(q, N) = B / (q φ(q)^5)` exactly. At primes the value
/// is cross-checked against `p 𝔏_d(p, N) - p (p-1)^5` from exact counts.
pub fn local_factor(q: u64, n: u64, d: u64) -> Result<LocalData> {
    local_factor_with(q, n, d, SumEngine::Auto)
}

pub fn local_factor_with(q: u64, n: u64, d: u64, engine: SumEngine) -> Result<LocalData> {
    let raw = b_complex_sum(q, n, d, engine)?;
    let used = match engine {
        SumEngine::Auto if q <= DD_LIMIT => SumEngine::DoubleDouble,
        SumEngine::Auto => SumEngine::Fft,
        e => e,
    };
    let b = certify(q, &raw)?;
    let counts = if q >= 5 && is_prime(q) || q <= 512 {
        Some(congruence_counts(q, n, d, CountMethod::Auto)?)
    } else {
        None
    };
    if let Some(c) = counts.filter(|_| is_prime(q)) {
        let pm = (q - 1) as i128;
        let expect = q as i128 * c.l as i128 - q as i128 * pm.pow(5);
        if expect != b {
            return Err(Error::Consistency(format!(
                "B_{d}({q}, {n}) = {b} by summation but {expect} by counting"
            )));
        }
    }
    Ok(LocalData {
        q,
        n_residue: n % q,
        d,
        k: counts.map(|c| c.k),
        l: counts.map(|c| c.l),
        b,
        b_float: raw.re,
        b_error_bound: raw.error_bound,
        a: a_from_b(q, b),
        engine: used,
    })
}

fn certify(q: u64, raw: &RawSum) -> Result<i128> {
    let tol = raw.error_bound.max(1e-6);
    if raw.error_bound >= 0.25 || raw.re.abs() >= 1e36 {
        return Err(Error::Precision(format!(
            "B mod {q}: error bound {:e} does not certify rounding",
            raw.error_bound
        )));
    }
    let b = raw.re_dd.round_i128();
    let gap = (raw.re_dd - Dd::from_i128(b)).to_f64();
    if gap.abs() > tol || raw.im.abs() > tol {
        return Err(Error::Precision(format!(
            "B mod {q}: sum {} + {}i is not within {tol:e} of an integer",
            raw.re, raw.im
        )));
    }
    Ok(b)
}

pub(crate) fn a_from_b(q: u64, b: i128) -> ExactRational {
    let den = BigInt::from(q) * BigInt::from(phi(q)).pow(5);
    ExactRational::new(BigInt::from(b), den)
}

/// Ramanujan sum `c_q(m) = Σ_{(a,q)=1} e(am/q) = μ(q/g) φ(q) / φ(q/g)`,
/// `g = (q, m)`.
pub fn ramanujan_sum(q: u64, m: i64) -> i64 {
    let g = gcd(q, m.unsigned_abs() % q.max(1));
    let g = if g == 0 { q } else { g };
    let t = mult_functions(q / g, &[]).expect("q >= 1");
    t.mu as i64 * (phi(q) / t.phi) as i64
}

/// Exact `B_d(q, N) = Σ_j 𝔏_d(q, j) c_q(j - N)`, from the full count table.
/// Independent of any floating-point summation.
pub fn b_exact(q: u64, n: u64, d: u64) -> Result<i128> {
    if q > HISTOGRAM_LIMIT {
        return Err(Error::Capacity(format!("b_exact: q = {q} exceeds {HISTOGRAM_LIMIT}")));
    }
    let t = count_table(q, d, CountMethod::Auto)?;
    let nr = (n % q) as i64;
    Ok(t
        .l
        .iter()
        .enumerate()
        .map(|(j, &l)| l as i128 * ramanujan_sum(q, j as i64 - nr) as i128)
        .sum())
}

/// Prime-power decomposition of `q`, for multiplicativity checks.
pub fn coprime_split(q: u64) -> Vec<u64> {
    factorize(q)
        .map(|f| f.factors.iter().map(|&(p, e)| p.pow(e)).collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        for n in [0u64, 7, 1_000_000] {
            for d in [1u64, 2, 15] {
                let l = local_factor(1, n, d).unwrap();
                assert_eq!(l.a, ExactRational::one());
            }
        }
        let l = local_factor(5, 0, 1).unwrap();
        assert_eq!((l.b, l.l), (0, Some(1024)));
        assert!(l.a.is_zero());
        let l = local_factor(5, 0, 5).unwrap();
        assert_eq!(l.b, -20);
        assert_eq!(l.a, ExactRational::new(-20, 5120));
        for n in 0..25 {
            assert_eq!(local_factor(25, n, 1).unwrap().b, 0);
        }
    }

    #[test]
    fn summation_matches_ramanujan_transform() {
        for q in [2u64, 3, 4, 6, 7, 8, 9, 12, 13, 18, 27, 36, 45, 63, 91] {
            for d in [1u64, 2, 3, 7] {
                for n in 0..q.min(12) {
                    let exact = b_exact(q, n, d).unwrap();
                    let dd = local_factor_with(q, n, d, SumEngine::DoubleDouble).unwrap();
                    let fft = local_factor_with(q, n, d, SumEngine::Fft).unwrap();
                    assert_eq!(dd.b, exact, "q={q} n={n} d={d}");
                    assert_eq!(fft.b, exact, "q={q} n={n} d={d}");
                    assert!((dd.b_float - exact as f64).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn double_double_is_tight_at_large_primes() {
        for p in [97u64, 103, 331] {
            for n in [0u64, 1, 2, 50] {
                let raw = b_complex_sum(p, n, 1, SumEngine::DoubleDouble).unwrap();
                let exact = b_exact(p, n, 1).unwrap();
                let gap = (raw.re_dd - Dd::from_i128(exact)).to_f64();
                assert!(gap.abs() < 1e-9, "p={p} gap={gap}");
                assert!(raw.error_bound < 1e-9);
            }
        }
    }

    #[test]
    fn multiplicativity() {
        let n = 123_456u64;
        for q1 in [4u64, 5, 7, 9, 11] {
            for q2 in [3u64, 8, 13, 25] {
                if gcd(q1, q2) != 1 {
                    continue;
                }
                let a = local_factor(q1 * q2, n, 1).unwrap().a;
                let b = &local_factor(q1, n, 1).unwrap().a * &local_factor(q2, n, 1).unwrap().a;
                assert_eq!(a, b, "q1={q1} q2={q2}");
            }
        }
    }

    #[test]
    fn ramanujan_sums() {
        for q in 1..60u64 {
            for m in -5..70i64 {
                let direct: f64 = (1..=q)
                    .filter(|&a| gcd(a, q) == 1)
                    .map(|a| e_frac(a as i128 * m as i128, q).re)
                    .sum();
                assert!((direct - ramanujan_sum(q, m) as f64).abs() < 1e-9);
            }
        }
    }
}
