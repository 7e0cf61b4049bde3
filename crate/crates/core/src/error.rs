use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("tabulated intensity does not cover ({t}, {z})")]
    TabulationGap { t: f64, z: u64 },
    #[error("intensity not strictly positive at ({t}, {z})")]
    NonPositiveRate { t: f64, z: u64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("empty state range [{lo}, {hi}]")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("bad time window: {0}")]
    BadWindow(String),
    #[error("index {i} outside 0..={n}")]
    IndexOut { i: u64, n: u64 },
    #[error("invalid bridge: {0}")]
    InvalidBridge(String),
    #[error("h-function underflow at t={t}, z={z}")]
    Underflow { t: f64, z: u64 },
    #[error("bad step {step}: must be positive and smaller than the window {window}")]
    BadStep { step: f64, window: f64 },
    #[error("probability drift {drift:e} exceeds {limit:e}")]
    ConservationLoss { drift: f64, limit: f64 },
    #[error("need at least 3 grid points, got {0}")]
    GridTooCoarse(usize),
    #[error("jump times not strictly increasing inside the window")]
    NotSorted,
    #[error("quadrature oracle supports n <= {max}, got {n}")]
    OracleScale { n: u64, max: u64 },
    #[error("rejection sampler supports n <= {max}, got {n}")]
    RejectionScale { n: u64, max: u64 },
    #[error("thinning majorant breached {refreshes} times at t={t}")]
    MajorantBreach { t: f64, refreshes: usize },
    #[error("path finished with {got} jumps, expected {expected}")]
    PinMiss { got: usize, expected: u64 },
    #[error("zero-variance estimators disagree: lhs={lhs}, rhs={rhs}")]
    DegenerateVariance { lhs: f64, rhs: f64 },
    #[error("resource cap exceeded: {requested} > {cap}")]
    ResourceCap { requested: u64, cap: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
