//! Numerical laboratory for the equation `N = x^2 + p1^3 + p2^3 + p3^3 + p4^3 + p5^3`
//! with `x` an almost-prime.
//!
//! The crate evaluates the explicit objects of the circle-method and sieve
//! treatment of this equation, each with an independent cross-check:
//!
//! - [`arith`]: primes, factorization, multiplicative functions, exact rationals.
//! - [`local`]: complete exponential sums, congruence counts, local factors,
//!   the singular series and the sieve density `omega`.
//! - [`analytic`]: scale parameters, Weyl sums, major-arc approximants,
//!   oscillatory integrals, the singular integral and the Farey dissection.
//! - [`sieve`]: Rosser weights, the linear-sieve functions, the iterated
//!   integrals `c_r` and the final positivity margin.
//! - [`enumeration`]: exhaustive representation search, weighted counts,
//!   almost-prime product sets and moment counts.

pub mod analytic;
pub mod arith;
pub mod enumeration;
pub mod error;
pub mod local;
pub mod numeric;
pub mod sieve;

pub use error::{Error, Result};
