use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::numeric::{e_frac, ComplexSum};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

/// Largest modulus accepted for direct or tabulated power sums.
pub const POWER_SUM_LIMIT: u64 = 1_000_000;

/// A complete exponential sum `Σ e(a n^k / q)` with an a-priori bound on the
/// accumulated floating-point error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSumValue {
    pub q: u64,
    pub a: u64,
    pub k: u32,
    pub units_only: bool,
    pub value: Complex64,
    pub error_bound: f64,
}

impl PowerSumValue {
    fn checked(self) -> Result<Self> {
        if self.error_bound >= 1e-6 * self.q as f64 {
            return Err(Error::Precision(format!(
                "power sum mod {}: error bound {:e} too large",
                self.q, self.error_bound
            )));
        }
        Ok(self)
    }
}

fn check_modulus(q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::Domain("power sum: q must be >= 1".into()));
    }
    if q > POWER_SUM_LIMIT {
        return Err(Error::Capacity(format!(
            "power sum: q = {q} exceeds {POWER_SUM_LIMIT}"
        )));
    }
    Ok(())
}

pub(crate) fn pow_res(n: u64, k: u32, q: u64) -> u64 {
    crate::arith::pow_mod(n, k as u64, q)
}

/// `h[r] = #{ 1 <= n <= q : (units_only => (n,q)=1), (mult*n)^k ≡ r }`.
pub(crate) fn power_histogram(q: u64, k: u32, units_only: bool, mult: u64) -> Vec<u64> {
    let mut h = vec![0u64; q as usize];
    for n in 1..=q {
        if units_only && gcd(n, q) != 1 {
            continue;
        }
        let m = ((mult % q) as u128 * n as u128 % q as u128) as u64;
        h[pow_res(m, k, q) as usize] += 1;
    }
    h
}

fn direct(q: u64, a: i64, k: u32, units_only: bool) -> Result<PowerSumValue> {
    check_modulus(q)?;
    let a = a.rem_euclid(q as i64) as u64;
    let mut acc = ComplexSum::new();
    let mut terms = 0u64;
    for n in 1..=q {
        if units_only && gcd(n, q) != 1 {
            continue;
        }
        let r = (a as u128 * pow_res(n, k, q) as u128) % q as u128;
        acc.add(e_frac(r as i128, q));
        terms += 1;
    }
    PowerSumValue {
        q,
        a,
        k,
        units_only,
        value: acc.value(),
        error_bound: 8.0 * f64::EPSILON * (terms as f64 + 1.0),
    }
    .checked()
}

/// `S_k(q, a) = Σ_{n=1}^{q} e(a n^k / q)` by direct summation.
pub fn complete_power_sum(q: u64, a: i64, k: u32) -> Result<PowerSumValue> {
    direct(q, a, k, false)
}

/// `S*_k(q, a)`, the same sum restricted to `(n, q) = 1`.
pub fn unit_power_sum(q: u64, a: i64, k: u32) -> Result<PowerSumValue> {
    direct(q, a, k, true)
}

/// `S_k(q, a)` (or `S*_k`) for every `a mod q` at once, via one inverse FFT
/// of the residue histogram of `n^k`.
pub fn power_sum_table(q: u64, k: u32, units_only: bool) -> Result<Vec<PowerSumValue>> {
    check_modulus(q)?;
    let values = histogram_transform(&power_histogram(q, k, units_only, 1));
    let mass: u64 = if units_only {
        (1..=q).filter(|&n| gcd(n, q) == 1).count() as u64
    } else {
        q
    };
    let bound = fft_error_bound(q, mass as f64);
    values
        .into_iter()
        .enumerate()
        .map(|(a, value)| {
            PowerSumValue {
                q,
                a: a as u64,
                k,
                units_only,
                value,
                error_bound: bound,
            }
            .checked()
        })
        .collect()
}

/// `X[a] = Σ_r h[r] e(a r / q)` for all `a`.
pub(crate) fn histogram_transform(h: &[u64]) -> Vec<Complex64> {
    let q = h.len();
    let mut buf: Vec<Complex64> = h.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
    if q > 1 {
        PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(q).process(&mut buf));
    }
    buf
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Conservative absolute error of one inverse FFT whose input has total mass
/// `mass`; mixed-radix and Bluestein paths both stay inside this envelope.
pub(crate) fn fft_error_bound(q: u64, mass: f64) -> f64 {
    let depth = (q.max(2) as f64).log2().ceil() + 4.0;
    4.0 * depth * f64::EPSILON * mass.max(1.0)
}

/// The exponent `γ(p)` beyond which `S*_k(p^ℓ, a)` vanishes for `(a, p) = 1`.
pub fn gamma_exponent(p: u64, k: u32) -> u32 {
    let mut theta = 0;
    let mut kk = k as u64;
    while kk % p == 0 {
        kk /= p;
        theta += 1;
    }
    if p == 2 && theta > 0 {
        theta + 3
    } else {
        theta + 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(z: Complex64, re: f64, im: f64) -> bool {
        (z.re - re).abs() < 1e-12 && (z.im - im).abs() < 1e-12
    }

    #[test]
    fn small_examples() {
        assert!(close(complete_power_sum(1, 1, 2).unwrap().value, 1.0, 0.0));
        assert!(close(complete_power_sum(4, 1, 2).unwrap().value, 2.0, 2.0));
        assert!(close(complete_power_sum(5, 1, 3).unwrap().value, 0.0, 0.0));
        assert!(close(unit_power_sum(5, 1, 3).unwrap().value, -1.0, 0.0));
        assert!(close(unit_power_sum(25, 1, 3).unwrap().value, 0.0, 0.0));
        let c = 6.0 * (std::f64::consts::TAU / 9.0).cos();
        assert!(close(unit_power_sum(9, 1, 3).unwrap().value, c, 0.0));
        assert!((c - 4.596).abs() < 1e-3);
        assert!(close(complete_power_sum(7, 0, 3).unwrap().value, 7.0, 0.0));
    }

    #[test]
    fn limits() {
        assert!(matches!(complete_power_sum(0, 1, 2), Err(Error::Domain(_))));
        assert!(matches!(
            complete_power_sum(POWER_SUM_LIMIT + 1, 1, 2),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn gamma_cases() {
        assert_eq!(gamma_exponent(5, 3), 2);
        assert_eq!(gamma_exponent(3, 3), 3);
        assert_eq!(gamma_exponent(2, 2), 4);
        assert_eq!(gamma_exponent(2, 3), 2);
        assert_eq!(gamma_exponent(3, 2), 2);
    }

    #[test]
    fn table_matches_direct_sums() {
        for q in [1u64, 2, 9, 12, 25, 97, 360] {
            for k in [2u32, 3] {
                for units in [false, true] {
                    let t = power_sum_table(q, k, units).unwrap();
                    for a in 0..q {
                        let d = direct(q, a as i64, k, units).unwrap();
                        assert!((t[a as usize].value - d.value).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn magnitude_bounds() {
        for q in 1..200u64 {
            let phi = (1..=q).filter(|&n| gcd(n, q) == 1).count() as f64;
            for k in [2u32, 3] {
                for v in power_sum_table(q, k, false).unwrap() {
                    assert!(v.value.norm() <= q as f64 + 1e-9);
                }
                for v in power_sum_table(q, k, true).unwrap() {
                    assert!(v.value.norm() <= phi + 1e-9);
                }
            }
        }
    }

    #[test]
    fn negative_a_is_conjugate() {
        for q in [7u64, 16, 45] {
            for a in 1..q as i64 {
                let p = complete_power_sum(q, a, 3).unwrap().value;
                let m = complete_power_sum(q, -a, 3).unwrap().value;
                assert!((p - m.conj()).norm() < 1e-12);
            }
        }
    }
}
