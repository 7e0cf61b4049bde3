//! Jump-time law of a bridge: the simplex density `exp(ξ)`, a quadrature
//! oracle for small heights, and exact, thinning and rejection samplers.
//!
//! Every sampler takes a 64-bit seed; replica `r` draws from stream `r` of
//! a ChaCha8 generator keyed by the seed, so runs are reproducible under
//! any thread count.

mod constant;
mod oracle;
mod output;
mod path;
pub mod quadrature;
mod rejection;
mod thinning;
mod xi;

pub use constant::{constant_variates, sample_constant};
pub use oracle::{simplex_log_normalizer, simplex_oracle_marginal, ORACLE_MAX_N, ORACLE_TOL};
pub use output::{median_jump_time, paths_csv, write_paths_csv, SampleSummary};
pub use path::PathSample;
pub use rejection::{sample_rejection, RejectionRun, MAX_PROPOSALS, REJECTION_MAX_N};
pub use thinning::{sample_bridge, ThinningRun, ThinningStats, MAJORANT_WINDOW, MAX_REFRESHES, PIN_GAP};
pub use xi::{density_unnormalized, xi_tables, XiPotential, DEFAULT_XI_STEP};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for replica `replica` of a run seeded with `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}
