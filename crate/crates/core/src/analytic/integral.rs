use super::params::ScaleParams;
use crate::error::{Error, Result};
use crate::numeric::{e, gauss_legendre, ComplexSum, KahanSum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which `v`-integral: `v2`, `v3` or `v3*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VKind {
    Two,
    Three,
    ThreeStar,
}

impl VKind {
    pub fn exponent(self) -> u32 {
        match self {
            VKind::Two => 2,
            _ => 3,
        }
    }

    pub fn lower(self, params: &ScaleParams) -> f64 {
        match self {
            VKind::Two => params.u2,
            VKind::Three => params.u3,
            VKind::ThreeStar => params.u3_star,
        }
    }
}

const GL_NODES: usize = 20;
const MAX_PANELS: usize = 1 << 20;
/// Above this many oscillations the endpoint expansion is used.
const ASYMPTOTIC_OSC: f64 = 2.0e3;
const V_TOL: f64 = 1e-11;

/// `v(β) = ∫_{U}^{2U} e(β u^k) du` for `kind`.
pub fn v_integral(kind: VKind, beta: f64, params: &ScaleParams) -> Result<Complex64> {
    let lo = kind.lower(params);
    v_range(kind.exponent(), lo, 2.0 * lo, beta)
}

/// `∫_{lo}^{hi} e(β u^k) du`.
pub fn v_range(k: u32, lo: f64, hi: f64, beta: f64) -> Result<Complex64> {
    if !(hi > lo) || lo < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if beta == 0.0 {
        return Ok(Complex64::new(hi - lo, 0.0));
    }
    let osc = beta.abs() * (hi.powi(k as i32) - lo.powi(k as i32));
    if osc > ASYMPTOTIC_OSC {
        return Ok(endpoint_expansion(k, lo, hi, beta));
    }
    let (x, w) = gauss_legendre(GL_NODES);
    let mut panels = (osc * k as f64).ceil() as usize + 1;
    let mut prev = panel_sum(k, lo, hi, beta, panels, &x, &w);
    loop {
        panels *= 2;
        if panels > MAX_PANELS {
            return Err(Error::Precision(format!(
                "v-integral did not converge: k = {k}, β = {beta:e}"
            )));
        }
        let cur = panel_sum(k, lo, hi, beta, panels, &x, &w);
        if (cur - prev).norm() <= V_TOL * (hi - lo) {
            return Ok(cur);
        }
        prev = cur;
    }
}

fn panel_sum(k: u32, lo: f64, hi: f64, beta: f64, panels: usize, x: &[f64], w: &[f64]) -> Complex64 {
    let h = (hi - lo) / panels as f64;
    let mut acc = ComplexSum::new();
    for i in 0..panels {
        let mid = lo + (i as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(w) {
            let u = mid + 0.5 * h * xi;
            acc.add(e(beta * u.powi(k as i32)) * (0.5 * h * wi));
        }
    }
    acc.value()
}

/// Repeated integration by parts in `t = u^k`:
/// `∫ e(βt) g(t) dt = [e(βt) Σ_j (-1)^j g^(j)(t) / (2πiβ)^(j+1)]`,
/// with `g(t) = t^{1/k-1}/k`.
fn endpoint_expansion(k: u32, lo: f64, hi: f64, beta: f64) -> Complex64 {
    let s = 1.0 / k as f64;
    let iw = Complex64::new(0.0, 2.0 * PI * beta);
    let at = |u: f64| -> Complex64 {
        let t = u.powi(k as i32);
        let mut coef = s; // (1/k)(1/k-1)...(1/k-j)
        let mut acc = Complex64::new(0.0, 0.0);
        let mut denom = iw;
        let mut last = f64::INFINITY;
        for j in 0..40 {
            let term = coef * t.powf(s - 1.0 - j as f64) / denom;
            let term = if j % 2 == 0 { term } else { -term };
            // the series is asymptotic: stop at its smallest term
            if term.norm() >= last {
                break;
            }
            last = term.norm();
            acc += term;
            if last < 1e-17 * acc.norm() {
                break;
            }
            coef *= s - 1.0 - j as f64;
            denom *= iw;
        }
        e(beta * t) * acc
    };
    at(hi) - at(lo)
}

/// `min(U, 2/(π k |β| U^{k-1}))`, the first-derivative bound.
pub fn v_bound(k: u32, lo: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return lo;
    }
    lo.min(2.0 / (PI * k as f64 * beta.abs() * lo.powi(k as i32 - 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JMethod {
    Grid,
    MonteCarlo,
    /// Both, with a 1% agreement check.
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JOptions {
    /// Midpoint nodes per outer dimension.
    pub grid_points: usize,
    pub inner_nodes: usize,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for JOptions {
    fn default() -> Self {
        JOptions {
            grid_points: 24,
            inner_nodes: 12,
            samples: 1_000_000,
            seed: 0x4a_4a,
            tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JValue {
    pub n: u64,
    pub value: f64,
    pub grid: Option<f64>,
    pub monte_carlo: Option<f64>,
    /// Standard error of the Monte Carlo estimate, when run.
    pub mc_std_error: Option<f64>,
    pub relative_gap: Option<f64>,
}

/// `𝔍(N)` in volume form:
/// `∫ (2√s)^{-1} du1..du5` over `(U3, 2U3]^3 × (U3*, 2U3*]^2`, restricted to
/// `√s ∈ (U2, 2U2]` with `s = N - Σ u_j^3`.
pub fn singular_integral(n: u64, method: JMethod, opts: &JOptions) -> Result<JValue> {
    if n < 10_000 {
        return Err(Error::Domain(format!("singular integral needs N >= 10^4, got {n}")));
    }
    let p = ScaleParams::desk(n);
    let grid = matches!(method, JMethod::Grid | JMethod::Dual).then(|| j_grid(&p, opts));
    let mc = matches!(method, JMethod::MonteCarlo | JMethod::Dual).then(|| j_monte_carlo(&p, opts));
    let mut out = JValue {
        n,
        value: grid.or(mc.map(|m| m.0)).unwrap_or(0.0),
        grid,
        monte_carlo: mc.map(|m| m.0),
        mc_std_error: mc.map(|m| m.1),
        relative_gap: None,
    };
    if let (Some(g), Some((m, _))) = (grid, mc) {
        let gap = (g - m).abs() / g.abs().max(f64::MIN_POSITIVE);
        out.relative_gap = Some(gap);
        if gap > opts.tolerance {
            return Err(Error::Precision(format!(
                "singular integral at N = {n}: grid {g:.6e} vs Monte Carlo {m:.6e} (gap {gap:.3e})"
            )));
        }
    }
    Ok(out)
}

fn s_window(p: &ScaleParams) -> (f64, f64) {
    (p.u2 * p.u2, 4.0 * p.u2 * p.u2)
}

fn j_grid(p: &ScaleParams, opts: &JOptions) -> f64 {
    let nf = p.n as f64;
    let (s_lo, s_hi) = s_window(p);
    let g = opts.grid_points;
    let (x, w) = gauss_legendre(opts.inner_nodes);
    let h3 = p.u3 / g as f64;
    let hs = p.u3_star / g as f64;
    let mid3: Vec<f64> = (0..g).map(|i| p.u3 + (i as f64 + 0.5) * h3).collect();
    let mids: Vec<f64> = (0..g).map(|i| p.u3_star + (i as f64 + 0.5) * hs).collect();
    let cubes3: Vec<f64> = mid3.iter().map(|u| u * u * u).collect();
    let cubess: Vec<f64> = mids.iter().map(|u| u * u * u).collect();
    let (a3, b3) = (p.u3, 2.0 * p.u3);
    let mut total = KahanSum::new();
    for c1 in &cubes3 {
        for c2 in &cubes3 {
            for c4 in &cubess {
                for c5 in &cubess {
                    let rest = nf - c1 - c2 - c4 - c5;
                    // u3^3 in [rest - s_hi, rest - s_lo)
                    let lo = a3.max((rest - s_hi).max(0.0).cbrt());
                    let hi = b3.min((rest - s_lo).max(0.0).cbrt());
                    if hi <= lo {
                        continue;
                    }
                    let half = 0.5 * (hi - lo);
                    let mid = 0.5 * (hi + lo);
                    let mut inner = 0.0;
                    for (xi, wi) in x.iter().zip(&w) {
                        let u = mid + half * xi;
                        inner += wi / (2.0 * (rest - u * u * u).sqrt());
                    }
                    total.add(inner * half);
                }
            }
        }
    }
    total.value() * h3 * h3 * hs * hs
}

fn j_monte_carlo(p: &ScaleParams, opts: &JOptions) -> (f64, f64) {
    let nf = p.n as f64;
    let (s_lo, s_hi) = s_window(p);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (mut sum, mut sq) = (KahanSum::new(), KahanSum::new());
    for _ in 0..opts.samples {
        let mut s = nf;
        for _ in 0..3 {
            let u = p.u3 * (1.0 + rng.gen::<f64>());
            s -= u * u * u;
        }
        for _ in 0..2 {
            let u = p.u3_star * (1.0 + rng.gen::<f64>());
            s -= u * u * u;
        }
        let f = if s > s_lo && s <= s_hi { 0.5 / s.sqrt() } else { 0.0 };
        sum.add(f);
        sq.add(f * f);
    }
    let m = opts.samples as f64;
    let mean = sum.value() / m;
    let var = (sq.value() / m - mean * mean).max(0.0);
    let vol = p.u3.powi(3) * p.u3_star.powi(2);
    (mean * vol, (var / m).sqrt() * vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::series::{weyl_series, SeriesKind};
    use crate::numeric::ls_slope;

    #[test]
    fn v_at_zero_is_length() {
        let p = ScaleParams::desk(100_000_000);
        for kind in [VKind::Two, VKind::Three, VKind::ThreeStar] {
            let v = v_integral(kind, 0.0, &p).unwrap();
            assert_eq!(v.re, kind.lower(&p));
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn v_matches_closed_form_for_k1() {
        // ∫_1^2 e(βu) du = (e(2β) - e(β)) / (2πiβ)
        for beta in [0.3, 7.0, 1234.5, 50_000.0] {
            let v = v_range(1, 1.0, 2.0, beta).unwrap();
            let exact = (e(2.0 * beta) - e(beta)) / Complex64::new(0.0, 2.0 * PI * beta);
            assert!((v - exact).norm() < 1e-10, "β = {beta}");
        }
    }

    #[test]
    fn asymptotic_route_agrees_with_quadrature() {
        let lo = 10.0;
        for beta in [0.11f64, 0.23, -0.17] {
            let osc = beta.abs() * 7000.0;
            assert!(osc < ASYMPTOTIC_OSC);
            let (x, w) = gauss_legendre(GL_NODES);
            let q = panel_sum(3, lo, 2.0 * lo, beta, 4000, &x, &w);
            let a = endpoint_expansion(3, lo, 2.0 * lo, beta);
            assert!((q - a).norm() < 1e-9, "{q} vs {a}");
        }
    }

    #[test]
    fn first_derivative_bound_on_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let k = rng.gen_range(2..=3u32);
            let lo = 10f64.powf(rng.gen_range(0.5..3.0));
            let beta = 10f64.powf(rng.gen_range(-9.0..0.0)) * if rng.gen() { 1.0 } else { -1.0 };
            let v = v_range(k, lo, 2.0 * lo, beta).unwrap();
            assert!(v.norm() <= v_bound(k, lo, beta) * (1.0 + 1e-9), "k={k} lo={lo} β={beta}");
        }
    }

    #[test]
    fn cubic_sum_tracks_integral_near_zero() {
        let p = ScaleParams::desk(100_000_000);
        let bmax = 1.0 / (24.0 * p.u3 * p.u3);
        for i in -10..=10 {
            let beta = bmax * i as f64 / 10.0;
            let f = weyl_series(SeriesKind::F3, beta, &p).unwrap().value;
            let v = v_integral(VKind::Three, beta, &p).unwrap();
            assert!((f - v).norm() <= 10.0);
        }
    }

    #[test]
    fn grid_and_monte_carlo_agree() {
        let j = singular_integral(100_000_000, JMethod::Dual, &JOptions::default()).unwrap();
        assert!(j.value > 0.0);
        assert!(j.relative_gap.unwrap() < 0.01);
    }

    #[test]
    fn growth_exponent() {
        let opts = JOptions {
            grid_points: 16,
            ..JOptions::default()
        };
        let (mut xs, mut ys) = (vec![], vec![]);
        for e10 in 6..=12 {
            let n = 10u64.pow(e10);
            xs.push((n as f64).ln());
            ys.push(singular_integral(n, JMethod::Grid, &opts).unwrap().value.ln());
        }
        let slope = ls_slope(&xs, &ys);
        assert!((slope - 19.0 / 18.0).abs() < 0.03, "slope {slope}");
    }
}
