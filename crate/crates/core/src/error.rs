use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point with norm {norm} is not inside the unit ball")]
    OutsideBall { norm: f64 },

    #[error("point with norm {norm} is not on the unit sphere")]
    NotOnBoundary { norm: f64 },

    #[error("tent apex must satisfy 0 < |ζ| < 1, got |ζ| = {norm}")]
    InvalidApex { norm: f64 },

    #[error("tent chain index {k} outside 0..={max}")]
    ChainIndex { k: u32, max: u32 },

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degree overflow: {0}")]
    DegreeOverflow(String),

    #[error("corona condition violated: |g(z)|² = {value:.3e} below guard {guard:.3e}")]
    CoronaViolation { value: f64, guard: f64 },

    #[error("kernel evaluated on the diagonal")]
    Diagonal,

    #[error("finite-difference step {step} too large for distance {margin} to the boundary")]
    StepTooLarge { step: f64, margin: f64 },

    #[error("right-hand side is not ∂̄-closed: residual {residual:.3e} > {tolerance:.3e}")]
    NotClosed { residual: f64, tolerance: f64 },

    #[error("quadrature produced a non-finite value")]
    NonFinite,

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
