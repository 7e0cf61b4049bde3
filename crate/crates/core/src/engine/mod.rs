//! Bridge machinery for arbitrary intensities: the h-function, the bridge
//! intensity, marginal tables and mean curves.

mod bridge;
mod chain;
mod grid;
mod hfield;
mod marginal;

pub use bridge::BridgeSpec;
pub use grid::{TimeGrid, TERMINAL_FRACTION, TERMINAL_STEP};
pub use hfield::{HField, MAX_H_STEP};
pub use marginal::{
    marginal_table, marginal_table_two_sided, mean_curve, second_differences, write_mean_csv,
    MarginalTable, DRIFT_LIMIT,
};

use crate::error::Result;
use crate::intensity::IntensityModel;
use crate::scalar::Scalar;

/// Solves the h-function of `spec` on a grid of step `h_step`.
pub fn solve_h<T: Scalar>(
    model: &IntensityModel<T>,
    spec: &BridgeSpec<T>,
    h_step: T,
) -> Result<HField<T>> {
    HField::solve(model, spec, h_step)
}

/// `ℓ(t, z) h(t, z+1) / h(t, z)`, or 0 at the top of the ladder.
pub fn bridge_intensity<T: Scalar>(
    model: &IntensityModel<T>,
    h: &HField<T>,
    t: T,
    z: u64,
) -> Result<T> {
    h.bridge_intensity(model, t, z)
}
