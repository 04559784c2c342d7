use thiserror::Error;

/// Why a matrix was rejected as a density matrix.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateViolation {
    #[error("matrix is not Hermitian (max |m - m^H| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("trace deviates from 1 by {0:e}")]
    Trace(f64),
    #[error("dimension {dim} is not 2^{n}")]
    Dimension { dim: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(#[from] StateViolation),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("vector is not a unit vector (norm {0})")]
    NonUnitVector(f64),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("measurement tree is incomplete: {0}")]
    IncompleteTree(String),
    #[error("correlation tensor for subset {0:?} is not present")]
    MissingSubset(Vec<usize>),
    #[error("unsupported qubit count {n} (allowed {min}..={max})")]
    UnsupportedSize { n: usize, min: usize, max: usize },
    #[error("imaginary residue {0:e} in a quantity that must be real")]
    ImaginaryResidue(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
