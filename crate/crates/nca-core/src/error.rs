use thiserror::Error;

/// Errors surfaced by lattice, algebra, order and bundle operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("bilinear form is singular")]
    SingularForm,
    #[error("lattice does not have full rank in its ambient space")]
    NotFull,
    #[error("lattice is not contained in the reference lattice")]
    NotContained,
    #[error("lattices do not span the same subspace")]
    SpanMismatch,
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
    #[error("twisted trace form is not positive definite")]
    NotPositive,
    #[error("not a ring: {0}")]
    NotARing(String),
    #[error("element is not a unit of the algebra")]
    NotAUnit,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("module has infinite cardinality")]
    InfiniteModule,
    #[error("submodule is not free: {0}")]
    NotFree(String),
    #[error("restricted bilinear form is degenerate")]
    ZeroGram,
    #[error("metric is degenerate on the given lattice")]
    DegenerateMetric,
    #[error("integer factor exceeds the supported prime range: {0}")]
    FactorTooLarge(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
