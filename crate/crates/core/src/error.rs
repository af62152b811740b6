use thiserror::Error;

/// Errors surfaced by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A cutoff table is too shallow for the requested evaluation.
    #[error("cutoff table too shallow: {0}; extend the table")]
    ExtendTable(String),

    /// Requested tolerance is below what double precision can certify.
    #[error("tolerance {0:e} is below achievable double precision (1e-14)")]
    ToleranceTooTight(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
