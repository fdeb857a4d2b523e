use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric is not positive definite at {point:?}")]
    DegenerateMetric { point: Vec<f64> },

    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("finite-difference stencil of step {step} leaves the chart domain at {point:?}")]
    StencilOutOfDomain { point: Vec<f64>, step: f64 },

    #[error("{action} needs a {expected} operand, got {found}")]
    IncompatibleIndex {
        action: &'static str,
        expected: &'static str,
        found: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{quantity} is only available for dimensions 3 and 4, got {found}")]
    UnsupportedDimension { quantity: &'static str, found: usize },

    #[error("schedule must contain at least {need} values, got {got}")]
    ScheduleTooShort { need: usize, got: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("precondition failed for {subject}: {detail}")]
    PreconditionFailed { subject: String, detail: String },

    #[error("root solve for {quantity} did not converge (last residual {residual:.3e})")]
    RootSolve { quantity: &'static str, residual: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the command line maps each failure class to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) | Error::Json(_) => 2,
            Error::RootSolve { .. } => 3,
            _ => 1,
        }
    }
}
