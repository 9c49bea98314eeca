use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamMode {
    /// Exponent relations of the asymptotic argument at a chosen `ε`, with
    /// `Q0` supplied (its true size `log^{20A} N` is unrealizable).
    PaperShape,
    /// Desk defaults with every cutoff independently overridable.
    Desk,
}

/// All cutoffs and ranges of the circle-method setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub n: u64,
    pub eps: f64,
    /// The constant `A = 10^100`, recorded as its decimal exponent.
    pub a_exp10: f64,
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    /// Sieve level `D`.
    pub d_level: f64,
    pub z: f64,
    pub u2: f64,
    pub u3: f64,
    pub u3_star: f64,
    pub mode: ParamMode,
}

/// Non-fatal observations from [`ScaleParams::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamFlags {
    pub notes: Vec<String>,
}

fn ranges(n: f64) -> (f64, f64, f64) {
    (n.sqrt() / 2.0, n.cbrt() / 3.0, n.powf(5.0 / 18.0) / 3.0)
}

impl ScaleParams {
    /// `Q1 = N^{4/9+50ε}`, `Q2 = N^{5/9-50ε}`, `D = N^{1/24-51ε}`,
    /// `z = D^{1/3}`, `U_k = N^{1/k}/k`, `U3* = N^{5/18}/3`.
    pub fn paper_shape(n: u64, eps: f64, q0: f64) -> Self {
        let nf = n as f64;
        let (u2, u3, u3_star) = ranges(nf);
        let d_level = nf.powf(1.0 / 24.0 - 51.0 * eps);
        ScaleParams {
            n,
            eps,
            a_exp10: 100.0,
            q0,
            q1: nf.powf(4.0 / 9.0 + 50.0 * eps),
            q2: nf.powf(5.0 / 9.0 - 50.0 * eps),
            d_level,
            z: d_level.cbrt(),
            u2,
            u3,
            u3_star,
            mode: ParamMode::PaperShape,
        }
    }

    /// Desk defaults: `Q0 = 2`, `Q1 = N^{4/9}`, `Q2 = N^{5/9}`, `D = N^{1/6}`,
    /// `z = D^{1/3}`, ranges as in the paper-shape mode.
    pub fn desk(n: u64) -> Self {
        let nf = n as f64;
        let (u2, u3, u3_star) = ranges(nf);
        let d_level = nf.powf(1.0 / 6.0);
        ScaleParams {
            n,
            eps: 0.0,
            a_exp10: 100.0,
            q0: 2.0,
            q1: nf.powf(4.0 / 9.0),
            q2: nf.powf(5.0 / 9.0),
            d_level,
            z: d_level.cbrt(),
            u2,
            u3,
            u3_star,
            mode: ParamMode::Desk,
        }
    }

    /// Override one cutoff by name (`q0`, `q1`, `q2`, `D`, `z`, `u2`, `u3`,
    /// `u3_star`, `eps`). Switches the mode to desk.
    pub fn with(mut self, key: &str, value: f64) -> Result<Self> {
        match key {
            "q0" => self.q0 = value,
            "q1" => self.q1 = value,
            "q2" => self.q2 = value,
            "D" | "d_level" => self.d_level = value,
            "z" => self.z = value,
            "u2" => self.u2 = value,
            "u3" => self.u3 = value,
            "u3_star" => self.u3_star = value,
            "eps" => self.eps = value,
            _ => return Err(Error::Validation(format!("unknown parameter '{key}'"))),
        }
        self.mode = ParamMode::Desk;
        Ok(self)
    }

    /// Hard requirements fail; soft ones are returned as notes.
    pub fn validate(&self) -> Result<ParamFlags> {
        let mut flags = ParamFlags::default();
        if self.n % 2 != 0 {
            return Err(Error::Validation(format!("N = {} must be even", self.n)));
        }
        if !(self.z > 2.0) {
            return Err(Error::Validation(format!("z = {} must exceed 2", self.z)));
        }
        if 2.0 * self.q1 > self.q2 {
            return Err(Error::Validation(format!(
                "2 Q1 <= Q2 fails: Q1 = {}, Q2 = {}",
                self.q1, self.q2
            )));
        }
        if self.mode == ParamMode::PaperShape {
            let (u2, u3, u3s) = ranges(self.n as f64);
            let ok = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
            if !(ok(self.u2, u2) && ok(self.u3, u3) && ok(self.u3_star, u3s) && ok(self.z, self.d_level.cbrt())) {
                return Err(Error::Validation(
                    "paper-shape ranges do not follow U_k = N^{1/k}/k, z = D^{1/3}".into(),
                ));
            }
        }
        if self.d_level < self.z.powi(3) * (1.0 - 1e-12) {
            flags.notes.push(format!("D = {} is below z^3 = {}", self.d_level, self.z.powi(3)));
        }
        Ok(flags)
    }

    /// Preconditions of the Farey dissection: `2 Q1 <= Q2`, `Q0^5 <= Q1` and
    /// `N >= Q0^6 Q2`, so that every `𝔐0(q, a)` sits inside `𝔐(q, a)`.
    pub fn validate_dissection(&self) -> Result<()> {
        if 2.0 * self.q1 > self.q2 {
            return Err(Error::Validation(format!(
                "2 Q1 <= Q2 fails: Q1 = {}, Q2 = {}",
                self.q1, self.q2
            )));
        }
        if self.q0.powi(5) > self.q1 {
            return Err(Error::Validation(format!(
                "Q0^5 <= Q1 fails: Q0^5 = {}, Q1 = {}",
                self.q0.powi(5),
                self.q1
            )));
        }
        if (self.n as f64) < self.q0.powi(6) * self.q2 {
            return Err(Error::Validation(format!(
                "N >= Q0^6 Q2 fails: N = {}, Q0^6 Q2 = {}",
                self.n,
                self.q0.powi(6) * self.q2
            )));
        }
        Ok(())
    }

    /// `log U = (log 2U3)^3 (log 2U3*)^2`.
    pub fn log_u(&self) -> f64 {
        (2.0 * self.u3).ln().powi(3) * (2.0 * self.u3_star).ln().powi(2)
    }

    /// `log W = (log U3)^2 (log U3*)^2`.
    pub fn log_w(&self) -> f64 {
        self.u3.ln().powi(2) * self.u3_star.ln().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_shape_relations() {
        let p = ScaleParams::paper_shape(1_000_000_000_000, 1e-4, 2.0);
        assert!((p.u2 - 5e5).abs() < 1e-6);
        assert!((p.u3 - 1e4 / 3.0).abs() < 1e-6);
        assert!((p.z.powi(3) - p.d_level).abs() < 1e-9 * p.d_level);
        // z = N^{1/72 - 17ε} stays below 2 for every N < 2^64
        assert!(matches!(p.validate(), Err(Error::Validation(m)) if m.contains("z =")));
        let p = ScaleParams::paper_shape(u64::MAX - 1, 0.0, 2.0);
        assert!(p.z < 2.0);
    }

    #[test]
    fn desk_defaults_and_overrides() {
        let p = ScaleParams::desk(100_000_000);
        assert_eq!(p.q0, 2.0);
        assert!(p.validate().unwrap().notes.is_empty());
        let p = p.with("D", 10.0).unwrap();
        assert_eq!(p.validate().unwrap().notes.len(), 1);
        let bad = ScaleParams::desk(100_000_000).with("z", 2.0).unwrap();
        assert!(matches!(bad.validate(), Err(Error::Validation(_))));
        let bad = ScaleParams::desk(100_000_000).with("q1", 1e5).unwrap();
        assert!(bad.validate().is_err());
        assert!(ScaleParams::desk(101).validate().is_err());
        assert!(ScaleParams::desk(10).with("nope", 1.0).is_err());
    }
}
