use thiserror::Error;

/// Errors produced by the operator algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid merge: supports {left:?} and {right:?} overlap")]
    InvalidMerge { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid restriction: {subset:?} is not contained in support {support:?}")]
    InvalidRestriction {
        subset: Vec<usize>,
        support: Vec<usize>,
    },

    #[error("rank {rank} out of range for {count} multi-indices")]
    RankOutOfRange { rank: usize, count: usize },

    #[error("index {value} out of range 1..={max} ({what})")]
    IndexOutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("matrix is singular (pivot {pivot:e} at step {step})")]
    SingularMatrix { step: usize, pivot: f64 },

    #[error("block B_{subset:?}({index:?}) is singular")]
    SingularBlock {
        /// 1-based dimensions of the block's subset.
        subset: Vec<usize>,
        /// Entries of the multi-index over the complement subset.
        index: Vec<usize>,
    },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix exponential overflow (norm {norm:e})")]
    ExpmOverflow { norm: f64 },

    #[error("eigenvalue computation failed in block B_{subset:?}({index:?}): {source}")]
    BlockEigen {
        subset: Vec<usize>,
        index: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("resolution mismatch: {0}")]
    ResolutionMismatch(String),

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("structural error: {0}")]
    Structure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
