//! Representation search, weighted counts, almost-prime product sets and
//! moment counts.

pub mod moments;
pub mod products;
pub mod reps;
pub mod weighted;

pub use moments::{
    moment_count, moment_count_naive, moment_exponent, Moment, MomentCount, MomentFit, EIGHT_VAR_LIMIT,
    MOMENT_NAIVE_LIMIT, SIX_VAR_LIMIT,
};
pub use products::{
    c_r_empirical, enumerate_product_sets, in_n_set, AlmostPrimeProductSet, CrEmpirical, ProductBounds, ProductKind,
    ProductMember, PRODUCT_NODE_BUDGET, PRODUCT_PRIME_LIMIT,
};

pub use reps::{
    box_representations, find_representations, find_representations_with, naive_representations, r_count,
    verify_range, Counting, RangeMode, RepresentationRecord, VerifyRow, VerifySummary, NAIVE_N_LIMIT, N_LIMIT,
    TABLE_LIMIT,
};
pub use weighted::{
    square_weight_direct, square_weights, weighted_j, weighted_j_naive, weighted_j_r, JrReading,
};
