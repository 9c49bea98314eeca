use super::params::ScaleParams;
use crate::arith::{gcd, ExactRational};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Pieces of `𝔍0 = (-1/Q2, 1 - 1/Q2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ArcLabel {
    /// `𝔐0`
    #[serde(rename = "M0")]
    MajorM0,
    /// `𝔪0 = 𝔐 \ 𝔐0`
    #[serde(rename = "m0")]
    MinorM0,
    /// `𝔪1`, the arcs with `Q0^5 < q <= Q1`
    #[serde(rename = "m1")]
    MinorM1,
    /// `𝔪2`, everything else
    #[serde(rename = "m2")]
    MinorM2,
}

impl ArcLabel {
    pub fn name(self) -> &'static str {
        match self {
            ArcLabel::MajorM0 => "M0",
            ArcLabel::MinorM0 => "m0",
            ArcLabel::MinorM1 => "m1",
            ArcLabel::MinorM2 => "m2",
        }
    }
}

/// Half-open interval `(lo, hi]`. `q = 0` marks a gap piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub label: ArcLabel,
    pub q: u64,
    pub a: u64,
    pub lo: ExactRational,
    pub hi: ExactRational,
}

impl Arc {
    pub fn center(&self) -> Option<ExactRational> {
        (self.q > 0).then(|| ExactRational::new(self.a, self.q))
    }

    pub fn length(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        &self.lo < x && x <= &self.hi
    }
}

/// Sorted partition of `𝔍0` into labelled half-open pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcDissection {
    pub params: ScaleParams,
    pub start: ExactRational,
    pub end: ExactRational,
    pub arcs: Vec<Arc>,
}

/// Piece-count ceiling for exact construction.
pub const ARC_LIMIT: usize = 2_000_000;

struct Cutoffs {
    q2: ExactRational,
    q0_5: ExactRational,
    m0_half: ExactRational,
    q1_floor: u64,
}

fn cutoffs(p: &ScaleParams) -> Result<Cutoffs> {
    let exact = |x: f64, name: &str| {
        ExactRational::from_f64(x).ok_or_else(|| Error::Validation(format!("{name} = {x} is not finite")))
    };
    let q0 = exact(p.q0, "Q0")?;
    let q0_5 = (0..5).map(|_| q0.clone()).product();
    Ok(Cutoffs {
        q2: exact(p.q2, "Q2")?,
        q0_5,
        m0_half: &q0 / &ExactRational::from_int(p.n),
        q1_floor: p.q1.floor().max(0.0) as u64,
    })
}

fn frac(a: u64, q: u64) -> ExactRational {
    ExactRational::new(a, q)
}

impl ArcDissection {
    /// `𝔐(q, a) = (a/q - 1/(qQ2), a/q + 1/(qQ2)]`, `𝔐0(q, a)` with half-width
    /// `Q0/N`, both over `q <= Q0^5`; `𝔪1` over `Q0^5 < q <= Q1`; the rest is
    /// `𝔪2`. Arcs reaching past `1 - 1/Q2` are translated by -1.
    pub fn build(params: &ScaleParams) -> Result<Self> {
        params.validate_dissection()?;
        let c = cutoffs(params)?;
        let estimate = 0.31 * (c.q1_floor as f64).powi(2) * 3.0;
        if estimate > ARC_LIMIT as f64 {
            return Err(Error::Capacity(format!(
                "about {estimate:.0} arc pieces for Q1 = {}; limit {ARC_LIMIT}",
                params.q1
            )));
        }
        let one = ExactRational::one();
        let start = -c.q2.recip();
        let end = &one + &start;
        let mut pieces: Vec<Arc> = Vec::new();
        let mut push = |label, q, a, lo: ExactRational, hi: ExactRational| {
            if hi <= end {
                pieces.push(Arc { label, q, a, lo, hi });
                return;
            }
            if lo < end {
                pieces.push(Arc { label, q, a, lo: lo.clone(), hi: end.clone() });
            }
            let lo = if lo < end { end.clone() } else { lo };
            pieces.push(Arc {
                label,
                q,
                a,
                lo: &lo - &one,
                hi: &hi - &one,
            });
        };
        for q in 1..=c.q1_floor {
            let major = ExactRational::from_int(q) <= c.q0_5;
            let half = (&ExactRational::from_int(q) * &c.q2).recip();
            for a in (1..=q).filter(|&a| gcd(a, q) == 1) {
                let ctr = frac(a, q);
                let (lo, hi) = (&ctr - &half, &ctr + &half);
                if major {
                    let (l0, h0) = (&ctr - &c.m0_half, &ctr + &c.m0_half);
                    push(ArcLabel::MinorM0, q, a, lo, l0.clone());
                    push(ArcLabel::MajorM0, q, a, l0, h0.clone());
                    push(ArcLabel::MinorM0, q, a, h0, hi);
                } else {
                    push(ArcLabel::MinorM1, q, a, lo, hi);
                }
            }
        }
        pieces.retain(|p| p.lo < p.hi);
        pieces.sort_by(|x, y| x.lo.cmp(&y.lo));
        let mut arcs = Vec::with_capacity(2 * pieces.len() + 1);
        let mut cursor = start.clone();
        for p in pieces {
            if p.lo < cursor {
                return Err(Error::Validation(format!(
                    "arcs overlap near {} (q = {}, a = {})",
                    p.lo, p.q, p.a
                )));
            }
            if p.lo > cursor {
                arcs.push(Arc {
                    label: ArcLabel::MinorM2,
                    q: 0,
                    a: 0,
                    lo: cursor.clone(),
                    hi: p.lo.clone(),
                });
            }
            cursor = p.hi.clone();
            arcs.push(p);
        }
        if cursor < end {
            arcs.push(Arc {
                label: ArcLabel::MinorM2,
                q: 0,
                a: 0,
                lo: cursor,
                hi: end.clone(),
            });
        }
        Ok(ArcDissection {
            params: *params,
            start,
            end,
            arcs,
        })
    }

    pub fn total_measure(&self) -> ExactRational {
        self.arcs.iter().map(Arc::length).sum()
    }

    pub fn measure_by_label(&self) -> BTreeMap<ArcLabel, ExactRational> {
        let mut m = BTreeMap::new();
        for a in &self.arcs {
            let e = m.entry(a.label).or_insert_with(ExactRational::zero);
            *e = &*e + &a.length();
        }
        m
    }

    /// Pieces are nonempty, in order, pairwise disjoint and cover `𝔍0`.
    pub fn check_partition(&self) -> Result<()> {
        let mut cursor = &self.start;
        for a in &self.arcs {
            if a.lo >= a.hi {
                return Err(Error::Property(format!("empty piece at {}", a.lo)));
            }
            if &a.lo != cursor {
                return Err(Error::Property(format!("pieces not contiguous at {}", a.lo)));
            }
            cursor = &a.hi;
        }
        if cursor != &self.end {
            return Err(Error::Property("pieces do not reach 1 - 1/Q2".into()));
        }
        Ok(())
    }

    /// `α` reduced into `𝔍0`.
    pub fn reduce(&self, alpha: &ExactRational) -> ExactRational {
        // k = ceil(α + 1/Q2) - 1
        let t = alpha - &self.start;
        let fl = t.floor();
        let k = if ExactRational::from_int(fl.clone()) == t { fl - 1 } else { fl };
        alpha - &ExactRational::from_int(k)
    }

    /// Binary search over the sorted pieces.
    pub fn locate(&self, alpha: &ExactRational) -> &Arc {
        let x = self.reduce(alpha);
        let i = self.arcs.partition_point(|a| a.hi < x);
        &self.arcs[i]
    }

    /// Independent route: scan every `q <= Q1` for an arc containing `α`.
    pub fn locate_direct(&self, alpha: &ExactRational) -> ArcLabel {
        locate_exact(&self.params, &self.reduce(alpha)).unwrap_or(ArcLabel::MinorM2)
    }
}

fn locate_exact(p: &ScaleParams, x: &ExactRational) -> Option<ArcLabel> {
    let c = cutoffs(p).ok()?;
    let one = ExactRational::one();
    for shift in [x.clone(), x + &one] {
        for q in 1..=c.q1_floor {
            let qr = ExactRational::from_int(q);
            let half = (&qr * &c.q2).recip();
            let near = (&shift * &qr).floor();
            for da in -1i64..=1 {
                let a = &near + BigInt::from(da);
                let Some(a) = a.to_u64() else { continue };
                if a == 0 || a > q || gcd(a, q) != 1 {
                    continue;
                }
                let ctr = frac(a, q);
                if !(&ctr - &half < shift && shift <= &ctr + &half) {
                    continue;
                }
                if qr > c.q0_5 {
                    return Some(ArcLabel::MinorM1);
                }
                let inside = &ctr - &c.m0_half < shift && shift <= &ctr + &c.m0_half;
                return Some(if inside { ArcLabel::MajorM0 } else { ArcLabel::MinorM0 });
            }
        }
    }
    None
}

/// Float classification without building the dissection, for sampling.
/// Boundary ties are resolved in floating point.
pub fn classify_fast(p: &ScaleParams, alpha: f64) -> ArcLabel {
    let start = -1.0 / p.q2;
    let x = alpha - (alpha - start).ceil() + 1.0;
    let q0_5 = p.q0.powi(5);
    let m0 = p.q0 / p.n as f64;
    for shift in [x, x + 1.0] {
        for q in 1..=p.q1.floor() as u64 {
            let a = (shift * q as f64).round();
            if a < 1.0 || a > q as f64 || gcd(a as u64, q) != 1 {
                continue;
            }
            let beta = shift - a / q as f64;
            if beta > 1.0 / (q as f64 * p.q2) || beta <= -1.0 / (q as f64 * p.q2) {
                continue;
            }
            if q as f64 > q0_5 {
                return ArcLabel::MinorM1;
            }
            return if beta > -m0 && beta <= m0 { ArcLabel::MajorM0 } else { ArcLabel::MinorM0 };
        }
    }
    ArcLabel::MinorM2
}

/// `𝔑(q, a) = (a/q - 1/(qQ0), a/q + 1/(qQ0)]` for `q <= Q0`, `-q <= a <= 2q`,
/// `(a, q) = 1`. These overlap and are not part of the partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NArc {
    pub q: u64,
    pub a: i64,
    pub lo: ExactRational,
    pub hi: ExactRational,
}

pub fn n_arcs(params: &ScaleParams) -> Result<Vec<NArc>> {
    let q0 = ExactRational::from_f64(params.q0)
        .ok_or_else(|| Error::Validation(format!("Q0 = {} is not finite", params.q0)))?;
    let qmax = params.q0.floor().max(0.0) as u64;
    if qmax > 10_000 {
        return Err(Error::Capacity(format!("Q0 = {} too large for explicit arcs", params.q0)));
    }
    let mut out = vec![];
    for q in 1..=qmax {
        let half = (&ExactRational::from_int(q) * &q0).recip();
        for a in -(q as i64)..=2 * q as i64 {
            if gcd(a.unsigned_abs(), q) != 1 {
                continue;
            }
            let ctr = ExactRational::new(a, q);
            out.push(NArc {
                q,
                a,
                lo: &ctr - &half,
                hi: &ctr + &half,
            });
        }
    }
    Ok(out)
}

/// Toy parameters `Q0 = 2`, `Q1 = 100`, `Q2 = 10^4`, `N = 10^8`.
pub fn toy_params() -> ScaleParams {
    ScaleParams {
        q0: 2.0,
        q1: 100.0,
        q2: 10_000.0,
        ..ScaleParams::desk(100_000_000)
    }
}
