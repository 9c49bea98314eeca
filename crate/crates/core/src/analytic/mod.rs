//! Generating series, oscillatory integrals, the singular integral and the
//! Farey dissection.

pub mod farey;
pub mod integral;
pub mod major;
pub mod minor;
pub mod params;
pub mod series;

pub use farey::{classify_fast, n_arcs, toy_params, Arc, ArcDissection, ArcLabel, NArc, ARC_LIMIT};
pub use integral::{singular_integral, v_bound, v_integral, v_range, JMethod, JOptions, JValue, VKind};
pub use major::{delta3_trend, g_r_ratio, g_r_series, major_arc_forms, Delta3Row, MajorArcForms};
pub use minor::{minor_arc_scan, MinorScanRow};
pub use params::{ParamFlags, ParamMode, ScaleParams};
pub use series::{
    c_coefficients, int_range, sieve_twisted_series, weyl_series, Phase, SeriesKind, SeriesValue,
    SieveCoefficients,
};
