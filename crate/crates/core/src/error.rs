use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("Wishart degrees of freedom {dof} smaller than dimension {dim}")]
    DofTooSmall { dim: usize, dof: usize },

    #[error("matrix is not symmetric: ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },

    #[error("Gauss-Hermite order {0} outside 1..=100")]
    OrderOutOfRange(usize),

    #[error(
        "tensor grid needs {requested} nodes ({after_pruning} after pruning), budget is {budget}"
    )]
    NodeBudgetExceeded {
        requested: u128,
        after_pruning: u128,
        budget: u64,
    },

    #[error("quadrature grid is empty after pruning")]
    EmptyGrid,

    #[error("prune rate {0} outside [0, 1]")]
    InvalidPruneRate(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Pareto front is empty")]
    EmptyFront,

    #[error("invalid Pareto front: {0}")]
    InvalidFront(String),

    #[error("point is not a member of the front")]
    PointNotInSet,

    #[error("front has zero span in objective {0}")]
    DegenerateSpan(usize),

    #[error("closed form requires a bivariate density, got dimension {0}")]
    NotBivariate(usize),

    #[error("closed form requires an independent (diagonal) density")]
    NotIndependent,

    #[error("reference quadrature did not settle: {coarse:e} vs {fine:e} at {cells} cells per dimension")]
    ResolutionTooLow {
        cells: usize,
        coarse: f64,
        fine: f64,
    },

    #[error("invalid front specification: {0}")]
    InvalidSpec(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("reference point is not strictly dominated by every front point")]
    ReferenceNotDominated,

    #[error("sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that stem from the numerical kernels rather than from
    /// user configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::NoConvergence { .. }
                | Error::ResolutionTooLow { .. }
                | Error::EmptyGrid
        )
    }
}
