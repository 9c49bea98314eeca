//! Double-double arithmetic (about 32 significant digits), enough to make
//! the rounding of `B_d(q, N)` to an integer unambiguous when the individual
//! terms reach `10^10`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Unit roundoff of the format.
pub const DD_EPS: f64 = 4.93e-32;

const TWO_PI: Dd = Dd {
    hi: 6.283_185_307_179_586,
    lo: 2.449_293_598_294_706_4e-16,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact for `|n| < 2^106`.
    pub fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        Dd {
            hi,
            lo: (n - hi as i128) as f64,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, f) = two_sum(self.hi, -p);
        let q2 = (s + (f - e + self.lo)) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    /// Nearest integer to the represented value, as `i128`.
    pub fn round_i128(self) -> i128 {
        let h = self.hi.round();
        let rest = (self - Dd::from_f64(h)).to_f64().round();
        h as i128 + rest as i128
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn scale(self, k: f64) -> Cdd {
        Cdd {
            re: self.re.mul_f64(k),
            im: self.im.mul_f64(k),
        }
    }

    pub fn norm(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn powu(self, n: u32) -> Cdd {
        (0..n).fold(Cdd::ONE, |acc, _| acc * self)
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

/// `(cos 2πn/m, sin 2πn/m)` for `0 <= n/m <= 1/8` by Taylor series.
fn cos_sin_small(n: u64, m: u64) -> (Dd, Dd) {
    let t = TWO_PI.mul_f64(n as f64).div_f64(m as f64);
    let t2 = t * t;
    let (mut c, mut s) = (Dd::ONE, t);
    let (mut tc, mut ts) = (Dd::ONE, t);
    let mut k = 1.0f64;
    while ts.hi.abs() > 1e-36 || tc.hi.abs() > 1e-36 {
        tc = -(tc * t2).div_f64((2.0 * k - 1.0) * (2.0 * k));
        ts = -(ts * t2).div_f64((2.0 * k) * (2.0 * k + 1.0));
        c = c + tc;
        s = s + ts;
        k += 1.0;
        if k > 40.0 {
            break;
        }
    }
    (c, s)
}

/// `e(r/q)` in double-double, reduced to the first octant by exact
/// integer symmetries.
pub fn e_dd(r: u64, q: u64) -> Cdd {
    let r = r % q;
    // conjugate half
    let (r, conj) = if 2 * r > q { (q - r, true) } else { (r, false) };
    // r/q in [0, 1/2]; reflect through 1/4: angle π - 2πu with u = (q-2r)/(2q)
    let (n, m, neg_cos) = if 4 * r > q {
        (q - 2 * r, 2 * q, true)
    } else {
        (r, q, false)
    };
    // n/m in [0, 1/4]; swap cos and sin around 1/8
    let (c, s) = if 8 * n > m {
        let (c2, s2) = cos_sin_small(m - 4 * n, 4 * m);
        (s2, c2)
    } else {
        cos_sin_small(n, m)
    };
    let c = if neg_cos { -c } else { c };
    let s = if conj { -s } else { s };
    Cdd { re: c, im: s }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beyond_double() {
        let a = Dd::from_f64(1.0) + Dd::from_f64(1e-20);
        let b = a - Dd::ONE;
        assert!((b.to_f64() - 1e-20).abs() < 1e-35);
        let third = Dd::ONE.div_f64(3.0);
        let back = third.mul_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn roots_of_unity_are_accurate() {
        for q in [1u64, 2, 3, 5, 7, 8, 9, 12, 97, 1000, 4093] {
            let mut sum = Cdd::ZERO;
            for r in 0..q {
                let z = e_dd(r, q);
                let norm = z.re * z.re + z.im * z.im - Dd::ONE;
                assert!(norm.to_f64().abs() < 1e-30, "q={q} r={r}");
                let f = std::f64::consts::TAU * r as f64 / q as f64;
                assert!((z.re.to_f64() - f.cos()).abs() < 1e-14);
                assert!((z.im.to_f64() - f.sin()).abs() < 1e-14);
                sum = sum + z;
            }
            let expect = if q == 1 { 1.0 } else { 0.0 };
            let err = (sum.re.to_f64() - expect).abs().max(sum.im.to_f64().abs());
            assert!(err < 1e-30 * (q as f64 + 10.0), "q={q} err={err:e}");
        }
        // e(1/8)^8 = 1 to double-double accuracy
        let w = e_dd(1, 8).powu(8);
        assert!((w.re - Dd::ONE).to_f64().abs() < 1e-30);
    }

    #[test]
    fn rounding_large_values() {
        let x = Dd::from_f64(1e20) + Dd::from_f64(3.0);
        assert_eq!(x.round_i128(), 100_000_000_000_000_000_003);
    }
}
