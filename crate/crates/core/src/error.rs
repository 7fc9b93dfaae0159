use thiserror::Error;

/// Every failure the library can report.
///
/// Each variant maps to a stable, machine-readable code through
/// [`KernelError::code`]; front ends should key on the code, not the message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("non-positive weight: {0}")]
    NonpositiveWeight(String),
    #[error("compact set is not inside the domain: {0}")]
    CompactNotInside(String),
    #[error("integrand returned a non-finite value at {0}")]
    NanIntegrand(String),
    #[error("no admissible path: {0}")]
    NoPath(String),
    #[error("path integral tolerance {tol:e} not met (error estimate {estimate:e})")]
    TolNotMet { tol: f64, estimate: f64 },
    #[error("invalid truncation order: {0}")]
    InvalidOrder(String),
    #[error("Gram matrix is ill-conditioned (reciprocal condition {rcond:e}); lower the truncation order")]
    IllConditioned { rcond: f64 },
    #[error("base point is too close to the zero set of the diagonal kernel: {0}")]
    NearZeroSet(String),
    #[error("bad test function: {0}")]
    BadTestFunction(String),
    #[error("point outside the unit disc: {0}")]
    OutOfDisc(String),
    #[error("point outside the annulus: {0}")]
    OutOfAnnulus(String),
    #[error("vanishing constraints are rank deficient: {0}")]
    ConstraintRank(String),
    #[error("grid point never enters the domain sequence: {0}")]
    GridEscapes(String),
    #[error("empty evaluation grid")]
    EmptyGrid,
}

impl KernelError {
    pub fn code(&self) -> &'static str {
        match self {
            KernelError::InvalidGeometry(_) => "INVALID_GEOMETRY",
            KernelError::NonpositiveWeight(_) => "NONPOSITIVE_WEIGHT",
            KernelError::CompactNotInside(_) => "COMPACT_NOT_INSIDE",
            KernelError::NanIntegrand(_) => "NAN_INTEGRAND",
            KernelError::NoPath(_) => "NO_PATH",
            KernelError::TolNotMet { .. } => "TOL_NOT_MET",
            KernelError::InvalidOrder(_) => "INVALID_ORDER",
            KernelError::IllConditioned { .. } => "ILL_CONDITIONED",
            KernelError::NearZeroSet(_) => "NEAR_ZERO_SET",
            KernelError::BadTestFunction(_) => "BAD_TEST_FUNCTION",
            KernelError::OutOfDisc(_) => "OUT_OF_DISC",
            KernelError::OutOfAnnulus(_) => "OUT_OF_ANNULUS",
            KernelError::ConstraintRank(_) => "CONSTRAINT_RANK",
            KernelError::GridEscapes(_) => "GRID_ESCAPES",
            KernelError::EmptyGrid => "EMPTY_GRID",
        }
    }
}

pub type Result<T> = std::result::Result<T, KernelError>;
