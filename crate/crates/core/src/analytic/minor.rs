use super::farey::{classify_fast, ArcLabel};
use super::params::ScaleParams;
use super::series::{sieve_twisted_series, SieveCoefficients};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinorScanRow {
    pub n: u64,
    pub samples: usize,
    /// Draws rejected for landing outside `𝔪2`.
    pub rejected: usize,
    pub max_abs_h: f64,
    pub mean_abs_h: f64,
    /// `max |h| / N^{5/18}`
    pub ratio: f64,
    /// `|h(1/2)|`, a point with tiny denominator, for contrast.
    pub h_at_half: f64,
}

/// Draws dyadic `α = k/2^40` uniformly from `𝔍0`, keeps those classified as
/// `𝔪2`, and records `|h(α)|` with unit coefficients under desk parameters.
pub fn minor_arc_scan(ns: &[u64], samples: usize, seed: u64) -> Result<Vec<MinorScanRow>> {
    let coef = SieveCoefficients::unit();
    let mut rows = vec![];
    for &n in ns {
        let p = ScaleParams::desk(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n);
        let (mut kept, mut rejected) = (0, 0);
        let (mut max, mut sum) = (0.0f64, 0.0);
        while kept < samples {
            let alpha = rng.gen_range(0..1u64 << 40) as f64 / (1u64 << 40) as f64;
            if classify_fast(&p, alpha) != ArcLabel::MinorM2 {
                rejected += 1;
                continue;
            }
            let h = sieve_twisted_series(alpha, &coef, &p)?.value.norm();
            max = max.max(h);
            sum += h;
            kept += 1;
        }
        rows.push(MinorScanRow {
            n,
            samples,
            rejected,
            max_abs_h: max,
            mean_abs_h: sum / samples.max(1) as f64,
            ratio: max / (n as f64).powf(5.0 / 18.0),
            h_at_half: sieve_twisted_series(0.5, &coef, &p)?.value.norm(),
        });
    }
    Ok(rows)
}
