//! Rosser weights, the linear sieve functions, the iterated-integral
//! constants `c_r` and the positivity margin.

pub mod constants;
pub mod functions;
pub mod rosser;

pub use constants::{
    c_r_constant, c_r_monte_carlo, phi2_closed, c_r_table_grid, c_r_with_limit, paper_bound, paper_constants, theorem_margin,
    CrConstant, CrMethod, Margin, DEFAULT_SAMPLES, DEFAULT_STEP, GRID_TOLERANCE, OUTER_LIMIT, PAPER_BOUNDS, R_MAX,
    R_MIN,
};
pub use functions::{linear_sieve_big_f, linear_sieve_small_f, EULER_GAMMA};
pub use rosser::{
    rosser_lambda, sandwich_report, sandwich_verify, sieve_sum, SandwichReport, SieveSign, SieveSumValue,
    SieveWeightSet, DEFAULT_NODE_BUDGET,
};
