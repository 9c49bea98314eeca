//! Exact arithmetic modulo `q`: complete exponential sums, congruence counts,
//! the local factors `B_d(q, N)` and `A_d(q, N)`, the singular series, the
//! sieve density `ω` and the sifting product `𝒱(z)`.

mod counts;
mod dd;
pub(crate) mod density;
mod factor;
mod power_sum;
mod singular;

pub use counts::{
    congruence_counts, count_congruence, count_table, CongruenceCounts, CountMethod, CountTable,
    CountVariant, CLASS_LIMIT, HISTOGRAM_LIMIT, NAIVE_LIMIT,
};
pub use dd::{Cdd, Dd};
pub use density::{omega_density, omega_prime, sifting_product_v, OmegaDensity, OmegaSource};
pub use factor::{
    b_complex_sum, b_exact, coprime_split, local_factor, local_factor_with, ramanujan_sum,
    LocalData, RawSum, SumEngine, DD_LIMIT,
};
pub use power_sum::{
    complete_power_sum, gamma_exponent, power_sum_table, unit_power_sum, PowerSumValue,
    POWER_SUM_LIMIT,
};
pub use singular::{
    euler_factor, singular_series, singular_series_with, SingularSeriesOptions,
    SingularSeriesValue,
};
