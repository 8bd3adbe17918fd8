use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("mismatched quadratic algebras in a binary operation")]
    AlgebraMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {0} is not invertible in the coefficient ring")]
    NotInvertible(String),
    #[error("mode error: {0}")]
    Mode(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("lookup error: {0}")]
    Lookup(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = FoldError> = std::result::Result<T, E>;
