use crate::error::{Error, Result};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `F(s) = 2e^γ/s` on `[1, 3]`.
pub fn linear_sieve_big_f(s: f64) -> Result<f64> {
    if !(1.0..=3.0).contains(&s) {
        return Err(Error::Domain(format!("F(s) is defined here on [1, 3]; s = {s}")));
    }
    Ok(2.0 * EULER_GAMMA.exp() / s)
}

/// `f(s) = 2e^γ log(s-1)/s` on `[2, 4]`.
pub fn linear_sieve_small_f(s: f64) -> Result<f64> {
    if !(2.0..=4.0).contains(&s) {
        return Err(Error::Domain(format!("f(s) is defined here on [2, 4]; s = {s}")));
    }
    Ok(2.0 * EULER_GAMMA.exp() * (s - 1.0).ln() / s)
}
