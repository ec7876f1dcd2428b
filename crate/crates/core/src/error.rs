use thiserror::Error;

/// Errors produced by model construction and landscape/spectral computations.
#[derive(Debug, Error)]
pub enum PottsError {
    #[error("invalid coupling constants: {0}")]
    InvalidCouplings(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state-space budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("eigensolver did not converge: {0}")]
    EigenFailure(String),
}

pub type Result<T> = std::result::Result<T, PottsError>;
