use super::integral::{v_integral, VKind};
use super::params::ScaleParams;
use super::series::{c_coefficients, int_range, weyl_series, Phase, SeriesKind, SieveCoefficients};
use crate::arith::{gcd, primes_up_to};
use crate::error::{Error, Result};
use crate::local::{complete_power_sum, unit_power_sum};
use crate::numeric::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Major-arc approximations at `α = a/q + β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorArcForms {
    pub q: u64,
    pub a: u64,
    pub beta: f64,
    /// `V2 = S2*(q,a)/φ(q) v2(β)`
    pub v2_form: Complex64,
    /// `V3 = S3*(q,a)/φ(q) v3(β)`
    pub v3_form: Complex64,
    /// `W3 = S3*(q,a)/φ(q) v3*(β)`
    pub w3_form: Complex64,
    /// `W = Σ_{d<=D} c(d)/(dq) S2(q, ad^2) v2(β)`
    pub w_form: Complex64,
    /// `Δ3 = f3(α) - S3*(q,a)/φ(q) Σ e(βn^3)`
    pub delta3: Complex64,
    /// `g_r(α)` when an `𝒩_r` list was supplied.
    pub g_r: Option<Complex64>,
}

fn phi(q: u64) -> u64 {
    (1..=q).filter(|&n| gcd(n, q) == 1).count() as u64
}

pub fn major_arc_forms(
    q: u64,
    a: u64,
    beta: f64,
    params: &ScaleParams,
    coef: &SieveCoefficients,
    n_r: Option<&[u64]>,
) -> Result<MajorArcForms> {
    if q == 0 || gcd(a, q) != 1 {
        return Err(Error::Domain(format!("major arc needs (a, q) = 1, got a = {a}, q = {q}")));
    }
    let ph = phi(q) as f64;
    let s2 = unit_power_sum(q, a as i64, 2)?.value / ph;
    let s3 = unit_power_sum(q, a as i64, 3)?.value / ph;
    let v2 = v_integral(VKind::Two, beta, params)?;
    let v3 = v_integral(VKind::Three, beta, params)?;
    let v3s = v_integral(VKind::ThreeStar, beta, params)?;

    let c = c_coefficients(params.d_level, coef)?;
    let mut w = ComplexSum::new();
    for (d, &cd) in c.iter().enumerate().skip(1) {
        if cd == 0.0 || d as f64 > params.d_level {
            continue;
        }
        let d = d as u64;
        let arg = ((a as u128 * (d as u128 * d as u128)) % q as u128) as i64;
        let s = complete_power_sum(q, arg, 2)?.value;
        w.add(s * (cd / (d as f64 * q as f64)));
    }
    let w_form = w.value() * v2;

    let alpha = a as f64 / q as f64 + beta;
    let f3 = weyl_series(SeriesKind::PrimeF3, alpha, params)?.value;
    let fb = weyl_series(SeriesKind::F3, beta, params)?.value;
    let delta3 = f3 - s3 * fb;

    let g_r = match n_r {
        Some(ells) => Some(g_r_series(alpha, ells, params)?),
        None => None,
    };
    Ok(MajorArcForms {
        q,
        a,
        beta,
        v2_form: s2 * v2,
        v3_form: s3 * v3,
        w3_form: s3 * v3s,
        w_form,
        delta3,
        g_r,
    })
}

/// `g_r(α) = Σ_{ℓ ∈ 𝒩_r} Σ_{U2 < ℓp <= 2U2} (log p / log(U2/ℓ)) e(α(ℓp)^2)`.
pub fn g_r_series(alpha: f64, ells: &[u64], params: &ScaleParams) -> Result<Complex64> {
    let Some(&lmin) = ells.iter().min() else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let pmax = (2.0 * params.u2 / lmin as f64).floor() as u64;
    let primes = primes_up_to(pmax);
    let ph = Phase::new(alpha);
    let mut acc = ComplexSum::new();
    for &l in ells {
        let lf = l as f64;
        let weight = (params.u2 / lf).ln();
        if weight <= 0.0 {
            return Err(Error::Domain(format!("ℓ = {l} is not below U2 = {}", params.u2)));
        }
        let r = int_range(params.u2 / lf, 2.0 * params.u2 / lf);
        let lo = primes.partition_point(|&p| p < *r.start());
        for &p in primes[lo..].iter().take_while(|&&p| p <= *r.end()) {
            let m = l as u128 * p as u128;
            if (m as f64) <= params.u2 || (m as f64) > 2.0 * params.u2 {
                continue;
            }
            acc.add(ph.e(m * m) * ((p as f64).ln() / weight));
        }
    }
    Ok(acc.value())
}

/// One row of the `|Δ3(a/q)| / f3(0)` trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta3Row {
    pub n: u64,
    pub q: u64,
    pub a: u64,
    pub abs_delta3: f64,
    pub f3_zero: f64,
    pub ratio: f64,
}

pub fn delta3_trend(ns: &[u64], q: u64, a: u64) -> Result<Vec<Delta3Row>> {
    ns.iter()
        .map(|&n| {
            let p = ScaleParams::desk(n);
            let f = major_arc_forms(q, a, 0.0, &p, &SieveCoefficients::unit(), None)?;
            let f0 = weyl_series(SeriesKind::PrimeF3, 0.0, &p)?.value.re;
            Ok(Delta3Row {
                n,
                q,
                a,
                abs_delta3: f.delta3.norm(),
                f3_zero: f0,
                ratio: f.delta3.norm() / f0,
            })
        })
        .collect()
}

/// `g_r(0) log U2 / (c_r V2(0))`; `V2(0) = U2` at `q = 1`.
pub fn g_r_ratio(ells: &[u64], c_r: f64, params: &ScaleParams) -> Result<f64> {
    let g = g_r_series(0.0, ells, params)?.re;
    Ok(g * params.u2.ln() / (c_r * params.u2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_one_reduces_to_plain_integrals() {
        let p = ScaleParams::desk(100_000_000);
        let f = major_arc_forms(1, 0, 0.0, &p, &SieveCoefficients::unit(), None).unwrap();
        assert_eq!(f.v3_form.re, p.u3);
        assert_eq!(f.v2_form.re, p.u2);
        assert_eq!(f.w3_form.re, p.u3_star);
        let beta = 3e-9;
        let f = major_arc_forms(1, 0, beta, &p, &SieveCoefficients::unit(), None).unwrap();
        assert_eq!(f.v2_form, v_integral(VKind::Two, beta, &p).unwrap());
        assert_eq!(f.w3_form, v_integral(VKind::ThreeStar, beta, &p).unwrap());
    }

    #[test]
    fn w_form_at_q_one() {
        // S2(1, .) = 1, so W(0) = U2 Σ c(d)/d
        let p = ScaleParams::desk(100_000_000);
        let f = major_arc_forms(1, 0, 0.0, &p, &SieveCoefficients::unit(), None).unwrap();
        let c = c_coefficients(p.d_level, &SieveCoefficients::unit()).unwrap();
        let s: f64 = c
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(d, _)| *d as f64 <= p.d_level)
            .map(|(d, cd)| cd / d as f64)
            .sum();
        assert!((f.w_form.re - p.u2 * s).abs() < 1e-9 * p.u2 * s);
    }

    #[test]
    fn delta3_is_small_relative_to_f3() {
        let rows = delta3_trend(&[1_000_000, 10_000_000, 100_000_000], 3, 1).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!(r.ratio < 0.5, "{r:?}");
        }
        assert!(rows.windows(2).all(|w| w[1].ratio < w[0].ratio), "{rows:?}");
    }

    #[test]
    fn g_r_empty_and_rejects_large_ell() {
        let p = ScaleParams::desk(100_000_000);
        assert_eq!(g_r_series(0.3, &[], &p).unwrap(), Complex64::new(0.0, 0.0));
        assert!(g_r_series(0.3, &[10_000], &p).is_err());
        assert!(major_arc_forms(4, 2, 0.0, &p, &SieveCoefficients::unit(), None).is_err());
    }
}
