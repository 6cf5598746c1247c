use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial of degree {degree} exceeds the requested degree {limit}")]
    DegreeTooHigh { degree: usize, limit: usize },

    /// A moment beyond the depth the functional can supply was requested.
    #[error("moment of degree {requested} requested but the functional is only reliable up to degree {available}")]
    DepthExceeded { requested: usize, available: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid Jacobi data: {0}")]
    InvalidJacobi(String),

    /// A Gram matrix has an eigenvalue (or pivot) below the negative tolerance.
    #[error("inconsistent moment data at degree {degree}: Gram matrix has eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    NotPositiveSemidefinite {
        degree: usize,
        eigenvalue: f64,
        tolerance: f64,
    },

    #[error("malformed input: {0}")]
    Malformed(String),

    /// Measure-born Fock data failed an internal adjointness or symmetry check.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("measure is not finitely supported within depth {depth}: rank at the top degree is {rank}")]
    NotFinitelySupported { depth: usize, rank: usize },

    #[error("commutation relations violated (residual {residual:e}); refusing to reconstruct")]
    CommutationViolated { residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
