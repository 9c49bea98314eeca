//! Small numerical helpers: compensated summation, roots of unity, quadrature
//! nodes and least-squares slopes.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `e(x) = exp(2 pi i x)`, with `x` first reduced to `[-1/2, 1/2]`.
pub fn e(x: f64) -> Complex64 {
    let r = x - x.round();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// `e(r/q)` for an integer residue, reduced exactly before the division.
pub fn e_frac(r: i128, q: u64) -> Complex64 {
    let q = q as i128;
    let mut r = r.rem_euclid(q);
    if 2 * r > q {
        r -= q;
    }
    let (s, c) = (TAU * (r as f64) / (q as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Table of `e(j/q)` for `j = 0..q`.
pub fn roots_of_unity(q: u64) -> Vec<Complex64> {
    (0..q as i128).map(|j| e_frac(j, q)).collect()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `B_n/(n+1)!` paired with the power `n + 1`, for `n = 0, 1` and even `n <= 20`.
const DILOG_COEF: [(i32, f64); 12] = [
    (1, 1.0),
    (2, -0.25),
    (3, 0.027_777_777_777_777_776),
    (5, -2.777_777_777_777_778e-4),
    (7, 4.724_111_866_969_01e-6),
    (9, -9.185_773_074_661_964e-8),
    (11, 1.897_886_998_897_1e-9),
    (13, -4.064_761_645_144_225_6e-11),
    (15, 8.921_691_020_456_452e-13),
    (17, -1.993_929_586_072_107_4e-14),
    (19, 4.518_980_029_619_918e-16),
    (21, -1.035_651_761_218_124_7e-17),
];

/// Real dilogarithm `Li2(x) = Σ x^k/k^2` for `x <= 1/2`. Arguments below -1
/// are inverted; otherwise `Li2(x) = Σ B_n u^{n+1}/(n+1)!` with
/// `u = -ln(1-x)`, `|u| <= ln 2`.
pub fn dilog(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < -1.0 {
        let l = (-x).ln();
        return -PI * PI / 6.0 - 0.5 * l * l - dilog(1.0 / x);
    }
    assert!(x <= 0.5, "dilog: argument {x} outside the supported range");
    let u = -(-x).ln_1p();
    DILOG_COEF.iter().map(|&(k, c)| c * u.powi(k)).sum()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
