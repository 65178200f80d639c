use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Bad user-facing parameter (dimension, angle, error weight...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A request that would exceed the desk-scale resource guard.
    #[error("resource guard exceeded: {0}")]
    Resource(String),

    /// The requested problem instance class has no members.
    #[error("degenerate instance class: {0}")]
    DegenerateInstanceClass(String),

    /// A numerical routine failed to converge or produced an inaccurate result.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A structural property that must hold by construction was violated.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// A codeword group law failed for the pair `(j, k)`.
    #[error("group law `{law}` violated for j={j}, k={k}")]
    GroupLaw { law: &'static str, j: usize, k: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
