use super::params::ScaleParams;
use crate::arith::prime_table;
use crate::error::{Error, Result};
use crate::numeric::{e, ComplexSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `e(m α)` for integer `m`, with `m |α| mod 1` formed exactly from the
/// binary expansion of `α`. The sign is applied by conjugation, so
/// `e(-mα)` is the exact conjugate of `e(mα)`.
#[derive(Debug, Clone, Copy)]
pub struct Phase {
    neg: bool,
    reduced: f64,
    mant: u128,
    shift: u32,
}

impl Phase {
    pub fn new(alpha: f64) -> Self {
        let neg = alpha < 0.0;
        let a = alpha.abs();
        let a = a - a.floor();
        if a == 0.0 {
            return Phase { neg, reduced: 0.0, mant: 0, shift: 0 };
        }
        let bits = a.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as u32;
        let frac = (bits & ((1u64 << 52) - 1)) as u128;
        let (mant, shift) = if exp == 0 {
            (frac, 1074)
        } else {
            (frac | (1u128 << 52), 1075 - exp)
        };
        Phase { neg, reduced: a, mant, shift }
    }

    /// `m |α| mod 1` in `[0, 1)`.
    pub fn frac(&self, m: u128) -> f64 {
        if self.mant == 0 {
            return 0.0;
        }
        if self.shift >= 128 {
            // |α| < 2^-75: m |α| is far below 1 for any realistic m
            let f = m as f64 * self.reduced;
            return f - f.floor();
        }
        let mask = (1u128 << self.shift) - 1;
        let r = m.wrapping_mul(self.mant) & mask;
        r as f64 * 2f64.powi(-(self.shift as i32))
    }

    pub fn e(&self, m: u128) -> Complex64 {
        let z = e(self.frac(m));
        if self.neg {
            z.conj()
        } else {
            z
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    /// `F3(α) = Σ_{U3 < n <= 2U3} e(n^3 α)`.
    F3,
    /// `F3*(α)` over `(U3*, 2U3*]`.
    F3Star,
    /// `f3(α) = Σ_{U3 < p <= 2U3} (log p) e(p^3 α)`.
    PrimeF3,
    /// `f3*(α)` over primes in `(U3*, 2U3*]`.
    PrimeF3Star,
    /// `f2(α, d) = Σ_{U2 < dℓ <= 2U2} e(α (dℓ)^2)`.
    F2 { d: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub kind: SeriesKind,
    pub alpha: f64,
    pub value: Complex64,
    pub term_count: u64,
    /// `Σ |weight|`, equal to `term_count` for unweighted kinds.
    pub weight_sum: f64,
}

/// Integers in `(lo, hi]` for real endpoints.
pub fn int_range(lo: f64, hi: f64) -> std::ops::RangeInclusive<u64> {
    let a = if lo < 0.0 { 0 } else { lo.floor() as u64 + 1 };
    let b = if hi < 0.0 { 0 } else { hi.floor() as u64 };
    if b < a {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    a..=b
}

fn sum_terms(alpha: f64, k: u32, terms: impl Iterator<Item = (u64, f64)>) -> (Complex64, u64, f64) {
    let ph = Phase::new(alpha);
    let mut acc = ComplexSum::new();
    let (mut count, mut weight) = (0u64, 0.0);
    for (n, w) in terms {
        acc.add(ph.e((n as u128).pow(k)) * w);
        count += 1;
        weight += w.abs();
    }
    (acc.value(), count, weight)
}

pub fn weyl_series(kind: SeriesKind, alpha: f64, params: &ScaleParams) -> Result<SeriesValue> {
    let (value, term_count, weight_sum) = match kind {
        SeriesKind::F3 => sum_terms(alpha, 3, int_range(params.u3, 2.0 * params.u3).map(|n| (n, 1.0))),
        SeriesKind::F3Star => sum_terms(
            alpha,
            3,
            int_range(params.u3_star, 2.0 * params.u3_star).map(|n| (n, 1.0)),
        ),
        SeriesKind::PrimeF3 | SeriesKind::PrimeF3Star => {
            let u = if kind == SeriesKind::PrimeF3 { params.u3 } else { params.u3_star };
            let r = int_range(u, 2.0 * u);
            if r.is_empty() {
                (Complex64::new(0.0, 0.0), 0, 0.0)
            } else {
                let t = prime_table(*r.start(), *r.end())?;
                sum_terms(alpha, 3, t.iter().map(|p| (p, (p as f64).ln())))
            }
        }
        SeriesKind::F2 { d } => {
            if d == 0 {
                return Err(Error::Domain("f2(α, d): d must be >= 1".into()));
            }
            f2_terms(alpha, d, params)
        }
    };
    Ok(SeriesValue {
        kind,
        alpha,
        value,
        term_count,
        weight_sum,
    })
}

fn f2_terms(alpha: f64, d: u64, params: &ScaleParams) -> (Complex64, u64, f64) {
    let df = d as f64;
    sum_terms(
        alpha,
        2,
        int_range(params.u2 / df, 2.0 * params.u2 / df)
            .map(|l| (d * l, 1.0))
            .filter(|&(m, _)| (m as f64) > params.u2 && (m as f64) <= 2.0 * params.u2),
    )
}

/// Real coefficient sequences `a(m)`, `b(n)` bounded by 1 in absolute value.
pub struct SieveCoefficients<'a> {
    pub a: &'a (dyn Fn(u64) -> f64 + Sync),
    pub b: &'a (dyn Fn(u64) -> f64 + Sync),
}

fn one(_: u64) -> f64 {
    1.0
}

impl SieveCoefficients<'static> {
    /// `a ≡ b ≡ 1`.
    pub fn unit() -> Self {
        SieveCoefficients { a: &one, b: &one }
    }
}

/// `c(d) = Σ_{d = mn, m <= D^{2/3}, n <= D^{1/3}} a(m) b(n)` for `d <= D`,
/// indexed by `d` (entry 0 unused).
pub fn c_coefficients(d_level: f64, coef: &SieveCoefficients) -> Result<Vec<f64>> {
    let mmax = d_level.powf(2.0 / 3.0).floor() as u64;
    let nmax = d_level.cbrt().floor() as u64;
    let dmax = (mmax * nmax).max(1) as usize;
    let mut c = vec![0.0; dmax + 1];
    let bs: Vec<f64> = (1..=nmax).map(|n| (coef.b)(n)).collect();
    for m in 1..=mmax {
        let am = (coef.a)(m);
        if am.abs() > 1.0 {
            return Err(Error::Domain(format!("|a({m})| = {} exceeds 1", am.abs())));
        }
        for (i, &bn) in bs.iter().enumerate() {
            if bn.abs() > 1.0 {
                return Err(Error::Domain(format!("|b({})| = {} exceeds 1", i + 1, bn.abs())));
            }
            c[m as usize * (i + 1)] += am * bn;
        }
    }
    Ok(c)
}

/// `h(α) = Σ_{m <= D^{2/3}} a(m) Σ_{n <= D^{1/3}} b(n) f2(α, mn)`, summed by
/// grouping on `d = mn`.
pub fn sieve_twisted_series(alpha: f64, coef: &SieveCoefficients, params: &ScaleParams) -> Result<SeriesValue> {
    let c = c_coefficients(params.d_level, coef)?;
    let mut acc = ComplexSum::new();
    let (mut count, mut weight) = (0u64, 0.0);
    for (d, &cd) in c.iter().enumerate().skip(1) {
        if cd == 0.0 {
            continue;
        }
        let (v, n, _) = f2_terms(alpha, d as u64, params);
        acc.add(v * cd);
        count += n;
        weight += cd.abs() * n as f64;
    }
    Ok(SeriesValue {
        kind: SeriesKind::F2 { d: 0 },
        alpha,
        value: acc.value(),
        term_count: count,
        weight_sum: weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> ScaleParams {
        ScaleParams::desk(100_000_000)
    }

    #[test]
    fn phase_reduction_is_exact() {
        let ph = Phase::new(0.375);
        assert_eq!(ph.frac(3), 0.125);
        let ph = Phase::new(1.0 / 3.0);
        // 3 * fl(1/3) is within an ulp of 1
        let f = ph.frac(3);
        assert!(f < 1e-15 || 1.0 - f < 1e-15);
        let ph = Phase::new(1e-300);
        assert!(ph.frac(1 << 40) > 0.0);
        let ph = Phase::new(-2.25);
        assert_eq!(ph.frac(1), 0.25);
    }

    #[test]
    fn value_at_zero_counts_terms() {
        let p = params();
        let f = weyl_series(SeriesKind::F3, 0.0, &p).unwrap();
        assert_eq!(f.value.re, f.term_count as f64);
        assert_eq!(f.term_count as usize, int_range(p.u3, 2.0 * p.u3).count());
        let f2 = weyl_series(SeriesKind::F2 { d: 3 }, 0.0, &p).unwrap();
        assert_eq!(f2.value.re, f2.term_count as f64);
    }

    #[test]
    fn prime_series_near_pnt() {
        let p = params();
        let f = weyl_series(SeriesKind::PrimeF3, 0.0, &p).unwrap();
        assert!(((f.value.re - p.u3) / p.u3).abs() < 0.15);
    }

    #[test]
    fn symmetry_periodicity_and_bounds() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let kinds = [
            SeriesKind::F3,
            SeriesKind::F3Star,
            SeriesKind::PrimeF3,
            SeriesKind::PrimeF3Star,
            SeriesKind::F2 { d: 2 },
        ];
        for _ in 0..100 {
            let alpha = rng.gen_range(0..1u64 << 40) as f64 / (1u64 << 40) as f64;
            for kind in kinds {
                let s = weyl_series(kind, alpha, &p).unwrap();
                let m = weyl_series(kind, -alpha, &p).unwrap();
                let t = weyl_series(kind, alpha + 1.0, &p).unwrap();
                assert_eq!(m.value, s.value.conj());
                assert_eq!(t.value, s.value);
                assert!(s.value.norm() <= s.weight_sum + 1e-9);
            }
        }
    }

    #[test]
    fn c_coefficients_and_h_at_zero() {
        let c = c_coefficients(1000.0, &SieveCoefficients::unit()).unwrap();
        // D^{2/3} = 100, D^{1/3} = 10: 6 = 1*6 = 2*3 = 3*2 = 6*1
        assert_eq!(c[6], 4.0);
        for (d, &cd) in c.iter().enumerate().skip(1).take(10_000) {
            let tau = factorize(d as u64).unwrap().divisors().len() as f64;
            assert!(cd.abs() <= tau);
        }
        let p = params();
        let h = sieve_twisted_series(0.0, &SieveCoefficients::unit(), &p).unwrap();
        let mmax = p.d_level.powf(2.0 / 3.0).floor() as u64;
        let nmax = p.d_level.cbrt().floor() as u64;
        let mut expect = 0u64;
        for m in 1..=mmax {
            for n in 1..=nmax {
                let d = (m * n) as f64;
                expect += int_range(p.u2 / d, 2.0 * p.u2 / d).count() as u64;
            }
        }
        assert_eq!(h.value.re, expect as f64);
        let bad = |_: u64| 2.0;
        let coef = SieveCoefficients { a: &bad, b: &one };
        assert!(c_coefficients(100.0, &coef).is_err());
    }
}
