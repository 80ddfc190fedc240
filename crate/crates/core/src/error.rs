use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at {0}")]
    Pole(String),
    #[error("result exceeds the representable range: {0}")]
    Overflow(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("argument outside the convergence domain: {0}")]
    Domain(String),
    #[error("series did not converge within {terms} terms")]
    NoConvergence { terms: usize },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
