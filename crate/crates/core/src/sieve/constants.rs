use super::functions::{linear_sieve_big_f, linear_sieve_small_f};
use crate::error::{Error, Result};
use crate::numeric::{dilog, KahanSum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Outer limit of the iterated integral.
pub const OUTER_LIMIT: f64 = 35.0;
pub const R_MIN: u32 = 7;
pub const R_MAX: u32 = 36;
pub const DEFAULT_STEP: f64 = 1.0 / 2000.0;
pub const DEFAULT_SAMPLES: usize = 1 << 25;

/// Published upper bounds: `c7`, `c8`, `c9`, then one bound for all `r >= 10`.
pub const PAPER_BOUNDS: [f64; 4] = [0.448_639, 0.113_524, 0.022_574, 0.003_579];

/// The 30 printed constants for `r = 7..=36`.
pub fn paper_constants() -> Vec<f64> {
    (R_MIN..=R_MAX).map(paper_bound).collect()
}

/// Printed bound for `c_r`.
pub fn paper_bound(r: u32) -> f64 {
    PAPER_BOUNDS[(r.clamp(R_MIN, 10) - R_MIN) as usize]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrMethod {
    Grid,
    #[serde(rename = "mc")]
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrConstant {
    pub r: u32,
    pub value: f64,
    pub method: CrMethod,
    pub grid_step: Option<f64>,
    pub samples: Option<usize>,
    /// Step-halving difference (grid) or standard error (Monte Carlo).
    pub error_estimate: f64,
    pub upper: f64,
}

/// Cumulative integrals on the uniform grid `x_i = 2 + i h`.
struct Grid {
    h: f64,
    per_unit: usize,
    /// `phi[j][i] = Φ_j(x_i)` for `j >= 2`.
    phi: Vec<Vec<f64>>,
}

fn check_step(step: f64) -> Result<usize> {
    let per_unit = (1.0 / step).round();
    if !(step > 0.0) || per_unit < 4.0 || ((1.0 / step) - per_unit).abs() > 1e-9 * per_unit {
        return Err(Error::Domain(format!("grid step {step} must be 1/n with n >= 4")));
    }
    Ok(per_unit as usize)
}

/// `∫_{x_0}^{x_i} g` at every node, integrating each cell with the quadratic
/// through three neighbouring nodes.
fn cumulative(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len();
    let mut out = vec![0.0; n];
    let mut acc = KahanSum::new();
    for i in 0..n.saturating_sub(1) {
        let cell = if i + 2 < n {
            h * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]) / 12.0
        } else if i >= 1 {
            h * (-g[i - 1] + 8.0 * g[i] + 5.0 * g[i + 1]) / 12.0
        } else {
            0.5 * h * (g[i] + g[i + 1])
        };
        acc.add(cell);
        out[i + 1] = acc.value();
    }
    out
}

impl Grid {
    /// `Φ2(t) = ∫_2^{t-1} log(u-1)/u du`,
    /// `Φ_j(t) = ∫_j^{t-1} Φ_{j-1}(u)/u du`, up to `j = jmax`, on `[2, top]`.
    fn build(step: f64, top: f64, jmax: usize) -> Result<Self> {
        let per_unit = check_step(step)?;
        let h = 1.0 / per_unit as f64;
        let n = ((top - 2.0) * per_unit as f64).ceil() as usize + 2;
        let x = |i: usize| 2.0 + i as f64 * h;
        let mut phi = vec![vec![]; jmax.max(2) + 1];
        let g2: Vec<f64> = (0..n).map(|i| (x(i) - 1.0).ln() / x(i)).collect();
        let c2 = cumulative(&g2, h);
        // Φ_j(x_i) = C(x_i - 1) - C(j) with C cumulative from 2
        let shift = |c: &[f64], j: usize| -> Vec<f64> {
            let lo = (j - 2) * per_unit;
            (0..n)
                .map(|i| if i >= per_unit + lo { c[i - per_unit] - c[lo] } else { 0.0 })
                .collect()
        };
        phi[2] = shift(&c2, 2);
        for j in 3..=jmax {
            let g: Vec<f64> = (0..n).map(|i| phi[j - 1][i] / x(i)).collect();
            let c = cumulative(&g, h);
            phi[j] = shift(&c, j);
        }
        Ok(Grid { h, per_unit, phi })
    }

    /// `c_r = ∫_{r-1}^{upper} Φ_{r-2}(t)/t dt`, linear interpolation at a
    /// non-node upper limit.
    fn c_r(&self, r: u32, upper: f64) -> f64 {
        let lo = r as f64 - 1.0;
        if upper <= lo {
            return 0.0;
        }
        let j = (r - 2) as usize;
        let n = self.phi[j].len();
        let g: Vec<f64> = (0..n).map(|i| self.phi[j][i] / (2.0 + i as f64 * self.h)).collect();
        let c = cumulative(&g, self.h);
        let at = |t: f64| {
            let pos = (t - 2.0) * self.per_unit as f64;
            let i = (pos.floor() as usize).min(n - 2);
            let w = pos - i as f64;
            c[i] * (1.0 - w) + c[i + 1] * w
        };
        at(upper) - at(lo)
    }
}

fn validate_r(r: u32) -> Result<()> {
    if !(R_MIN..=R_MAX).contains(&r) {
        return Err(Error::Domain(format!("c_r needs 7 <= r <= 36, got {r}")));
    }
    Ok(())
}

/// Step-halving tolerance for the grid route.
pub const GRID_TOLERANCE: f64 = 1e-6;

/// Every `c_r`, `r = 7..=36`, on one grid; each value carries the change
/// seen when the step is doubled. Fails if that change exceeds
/// [`GRID_TOLERANCE`].
pub fn c_r_table_grid(step: f64, upper: f64) -> Result<Vec<CrConstant>> {
    c_r_grid_range(R_MIN, R_MAX, step, upper, GRID_TOLERANCE)
}

fn c_r_grid_range(r_lo: u32, r_hi: u32, step: f64, upper: f64, tol: f64) -> Result<Vec<CrConstant>> {
    let top = upper.max(3.0);
    let jmax = (r_hi - 2) as usize;
    // the doubled step must itself be a valid grid
    if check_step(step)? % 2 != 0 || check_step(2.0 * step).is_err() {
        return Err(Error::Domain(format!("grid step {step} must be 1/n with n even and n >= 8")));
    }
    let fine = Grid::build(step, top, jmax)?;
    let coarse = Grid::build(2.0 * step, top, jmax)?;
    (r_lo..=r_hi)
        .map(|r| {
            let v = fine.c_r(r, upper);
            let err = (v - coarse.c_r(r, upper)).abs();
            if err > tol {
                return Err(Error::Precision(format!(
                    "c_{r}: step {step} changes the value by {err:.2e}"
                )));
            }
            Ok(CrConstant {
                r,
                value: v,
                method: CrMethod::Grid,
                grid_step: Some(step),
                samples: None,
                error_estimate: err,
                upper,
            })
        })
        .collect()
}

/// `c_r` with outer limit `upper` in place of 35.
pub fn c_r_with_limit(r: u32, upper: f64, step: f64) -> Result<CrConstant> {
    if r < 4 {
        return Err(Error::Domain(format!("c_r needs r >= 4, got {r}")));
    }
    Ok(c_r_grid_range(r, r, step, upper, f64::INFINITY)?.remove(0))
}

/// `c_r` by the chosen method. `param` is the grid step or the sample count.
pub fn c_r_constant(r: u32, method: CrMethod, param: f64, seed: u64) -> Result<CrConstant> {
    validate_r(r)?;
    match method {
        CrMethod::Grid => Ok(c_r_grid_range(r, r, param, OUTER_LIMIT, GRID_TOLERANCE)?.remove(0)),
        CrMethod::MonteCarlo => c_r_monte_carlo(r, param as usize, seed, OUTER_LIMIT),
    }
}

/// `Φ2(T) = ∫_2^{T-1} log(u-1)/u du = ln(T-2) ln(T-1) + Li2(2-T) + π²/12`,
/// zero for `T <= 3`.
pub fn phi2_closed(t: f64) -> f64 {
    if t <= 3.0 {
        return 0.0;
    }
    let pi2_12 = std::f64::consts::PI.powi(2) / 12.0;
    (t - 2.0).ln() * (t - 1.0).ln() + dilog(2.0 - t) + pi2_12
}

/// With `y_i = t_i - (r - i)` the outer `r - 3` variables fill the ordered
/// simplex `L >= y_1 >= ... >= y_{r-3} >= 0`, `L = upper + 1 - r`, sampled
/// exactly by sorting uniforms; the innermost integral is `Φ2` in closed
/// form. Chunks run in parallel with per-chunk streams and are reduced in
/// order.
pub fn c_r_monte_carlo(r: u32, samples: usize, seed: u64, upper: f64) -> Result<CrConstant> {
    if r < 4 {
        return Err(Error::Domain(format!("c_r needs r >= 4, got {r}")));
    }
    if samples == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one sample".into()));
    }
    let big_l = upper + 1.0 - r as f64;
    let mk = |value, err| CrConstant {
        r,
        value,
        method: CrMethod::MonteCarlo,
        grid_step: None,
        samples: Some(samples),
        error_estimate: err,
        upper,
    };
    if big_l <= 0.0 {
        return Ok(mk(0.0, 0.0));
    }
    let dim = (r - 3) as usize;
    let volume = big_l.powi(dim as i32) / (1..=dim).map(|k| k as f64).product::<f64>();
    const CHUNK: usize = 1 << 16;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut y = vec![0.0; dim];
            let (mut s, mut s2) = (KahanSum::new(), KahanSum::new());
            for _ in 0..n {
                for v in y.iter_mut() {
                    *v = rng.gen::<f64>() * big_l;
                }
                y.sort_unstable_by(|a, b| b.total_cmp(a));
                let mut f = 1.0;
                for (i, &yi) in y.iter().enumerate() {
                    f /= yi + (r as usize - 1 - i) as f64;
                }
                f *= phi2_closed(y[dim - 1] + 3.0);
                s.add(f);
                s2.add(f * f);
            }
            (s.value(), s2.value())
        })
        .collect();
    let (mut s, mut s2) = (KahanSum::new(), KahanSum::new());
    for (a, b) in parts {
        s.add(a);
        s2.add(b);
    }
    let m = samples as f64;
    let mean = s.value() / m;
    let var = (s2.value() / m - mean * mean).max(0.0);
    Ok(mk(mean * volume, (var / m).sqrt() * volume))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub sum_c: f64,
    /// `log 2 - Σ c_r`
    pub raw_margin: f64,
    /// `f(3) - F(3) Σ c_r = (2e^γ/3) raw_margin`
    pub scaled_margin: f64,
}

pub fn theorem_margin(c_values: &[f64]) -> Result<Margin> {
    if c_values.len() != (R_MAX - R_MIN + 1) as usize {
        return Err(Error::Domain(format!(
            "margin needs 30 values of c_r (r = 7..=36), got {}",
            c_values.len()
        )));
    }
    let sum_c = c_values.iter().copied().collect::<KahanSum>().value();
    let f3 = linear_sieve_small_f(3.0)?;
    let big_f3 = linear_sieve_big_f(3.0)?;
    Ok(Margin {
        sum_c,
        raw_margin: std::f64::consts::LN_2 - sum_c,
        scaled_margin: f3 - big_f3 * sum_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_with_printed_constants() {
        let m = theorem_margin(&paper_constants()).unwrap();
        assert!((m.sum_c - 0.681_370).abs() < 1e-9);
        assert!((m.raw_margin - 0.011_777).abs() < 1e-6);
        let two_eg_3 = 2.0 * super::super::functions::EULER_GAMMA.exp() / 3.0;
        assert!((m.scaled_margin - two_eg_3 * m.raw_margin).abs() < 1e-12);
        let z = theorem_margin(&[0.0; 30]).unwrap();
        assert_eq!(z.raw_margin, std::f64::consts::LN_2);
        assert!(theorem_margin(&[0.0; 29]).is_err());
    }

    #[test]
    fn margin_is_linear() {
        let base = paper_constants();
        let m0 = theorem_margin(&base).unwrap();
        for i in [0, 5, 29] {
            let mut c = base.clone();
            c[i] += 0.01;
            let m1 = theorem_margin(&c).unwrap();
            assert!((m0.raw_margin - m1.raw_margin - 0.01).abs() < 1e-12);
        }
    }

    #[test]
    fn small_case_closed_form() {
        // c_4 = ∫_3^{L} Φ2(t)/t dt against a direct midpoint double sum
        let upper = 6.0;
        let g = c_r_with_limit(4, upper, 1.0 / 400.0).unwrap().value;
        let n = 3000;
        let mut direct = 0.0;
        let h = (upper - 3.0) / n as f64;
        for i in 0..n {
            let t = 3.0 + (i as f64 + 0.5) * h;
            let m = 400;
            let hu = (t - 3.0).max(0.0) / m as f64;
            let inner: f64 = (0..m)
                .map(|k| {
                    let u = 2.0 + (k as f64 + 0.5) * hu;
                    (u - 1.0).ln() / u
                })
                .sum::<f64>()
                * hu;
            direct += inner / t * h;
        }
        assert!((g - direct).abs() < 1e-5, "{g} vs {direct}");
    }

    #[test]
    fn phi2_matches_quadrature() {
        for t in [3.0, 3.5, 7.25, 20.0, 35.0] {
            let m = 400_000;
            let h = (t - 3.0) / m as f64;
            let q: f64 = (0..m)
                .map(|k| {
                    let u = 2.0 + (k as f64 + 0.5) * h;
                    (u - 1.0).ln() / u
                })
                .sum::<f64>()
                * h;
            assert!((phi2_closed(t) - q).abs() < 1e-8, "T = {t}: {} vs {q}", phi2_closed(t));
        }
    }

    #[test]
    fn grid_step_must_halve_cleanly() {
        for bad in [0.25, 1.0 / 9.0, 0.3, -0.1] {
            assert!(matches!(c_r_with_limit(7, 35.0, bad), Err(Error::Domain(_))), "{bad}");
        }
        assert!(c_r_with_limit(7, 35.0, 1.0 / 64.0).is_ok());
    }

    #[test]
    fn table_properties() {
        let t = c_r_table_grid(DEFAULT_STEP, OUTER_LIMIT).unwrap();
        assert_eq!(t.len(), 30);
        assert_eq!(t[29].value, 0.0);
        for w in t.windows(2) {
            assert!(w[0].value >= w[1].value);
        }
        for c in &t {
            assert!(c.value <= paper_bound(c.r) * 1.01, "{c:?}");
        }
        let half = c_r_table_grid(DEFAULT_STEP / 2.0, OUTER_LIMIT).unwrap();
        for (a, b) in t.iter().zip(&half).take(4) {
            assert!((a.value - b.value).abs() < 1e-4);
        }
        assert!((t[0].value - 0.448_638_5).abs() < 2e-7, "{}", t[0].value);
    }

    #[test]
    fn monte_carlo_agrees() {
        for r in [7, 10] {
            let g = c_r_constant(r, CrMethod::Grid, DEFAULT_STEP, 0).unwrap();
            let m = c_r_constant(r, CrMethod::MonteCarlo, 1e6, 42).unwrap();
            assert!((g.value - m.value).abs() < 5.0 * m.error_estimate, "{g:?} {m:?}");
        }
        assert_eq!(c_r_constant(36, CrMethod::MonteCarlo, 10.0, 1).unwrap().value, 0.0);
        assert!(c_r_constant(6, CrMethod::Grid, DEFAULT_STEP, 0).is_err());
    }
}
