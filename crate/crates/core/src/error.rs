use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("kron operands must both be vectors or both be matrices")]
    MixedOperands,

    #[error("subsystem label {label} out of range 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },

    #[error("duplicate subsystem label {0}")]
    DuplicateLabel(usize),

    #[error("subset must be nonempty")]
    EmptySubset,

    #[error("subsets overlap")]
    OverlappingSubsets,

    #[error("invalid entropy parameters: {0}")]
    InvalidParams(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("Kraus set is not complete (deviation {0:.3e})")]
    IncompleteKraus(f64),

    #[error("mixer is not an isometry (deviation {0:.3e})")]
    NotIsometry(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration guard: |s| = {0} exceeds the limit of {1}")]
    EnumerationGuard(usize, usize),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors raised by size guards rather than invalid input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::EnumerationGuard(..) | Error::ResourceGuard(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
