//! Executable checks: convexity of the mean curve, binomial dominance of
//! tails, the mean bound, the duality formula and the law of large numbers.
//! Reports are `f64` only.

mod convexity;
mod dominance;
mod duality;
mod lln;
mod report;

pub use convexity::{convexity_check, Claim, ConvexityReport, CURVE_FRACTION, DEFAULT_CONVEXITY_STEP};
pub use dominance::{
    default_t_grid, dominance_check, dominance_from_table, mean_bound_check, BoundReport, Certification,
    Direction, MarginRow, MeanBoundReport, DEFAULT_CHECK_STEP,
};
pub use duality::{
    duality_catalog, duality_check, duality_on_paths, DualityReport, Functional, TestFunction, DUALITY_Z,
};
pub use lln::{lln_experiment, lln_experiment_capped, lln_h_step, sup_distance, LLNReport, LlnRow, LLN_BUDGET};
pub use report::{CheckReport, Verdict};
