use thiserror::Error;

/// Errors surfaced by state construction, mode transformations and sampling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate mode id `{0}` in registry")]
    DuplicateMode(String),
    #[error("mode id `{0}` not present in registry")]
    UnknownMode(String),
    #[error("occupation vector has {got} entries, registry has {want} modes")]
    DimensionMismatch { got: usize, want: usize },
    #[error("state norm {0} differs from 1 beyond tolerance")]
    NotNormalized(f64),
    #[error("state has no terms")]
    EmptyState,
    #[error("matrix is {rows}x{cols}, expected square of size {want}")]
    BadMatrixShape { rows: usize, cols: usize, want: usize },
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("mixture weights sum to {0}, expected 1")]
    BadWeights(f64),
    #[error("negative mixture weight {0}")]
    NegativeWeight(f64),
    #[error("states are defined over different mode registries")]
    RegistryMismatch,
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("distribution mixes patterns with different photon totals ({0} and {1})")]
    MixedTotals(u32, u32),
    #[error("count for unresolvable pattern `{0}` cannot be corrected")]
    UncorrectablePattern(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
