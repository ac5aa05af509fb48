use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid leg configuration: {0}")]
    InvalidLeg(String),
    #[error("missing spectral value for leg {0}")]
    MissingSpectral(usize),
    #[error("pole encountered: {0}")]
    Pole(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("eigenvalue on the principal branch cut: {0}")]
    BranchCut(String),
    #[error("matrix is not diagonalizable: {0}")]
    NotDiagonalizable(String),
    #[error("operation not supported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("matrix is not zero weight: {0}")]
    NotZeroWeight(String),
    #[error("input depends on the dynamical variables: {0}")]
    DynamicalInput(String),
    #[error("parse error at byte {position}: expected {expected}, found {found}")]
    Parse {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("sampler error: {0}")]
    Sampler(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
