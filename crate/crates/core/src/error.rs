use thiserror::Error;

/// Errors raised by the series algebra, the regression engine and the bootstrap tests.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HegyError {
    #[error("series too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("series length {0} is not a multiple of four")]
    LengthNotMultipleOfFour(usize),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("singular design: regressors are collinear ({0})")]
    SingularDesign(String),

    #[error("zero variance for coefficient `{0}` (exact fit)")]
    ZeroVariance(String),

    #[error("zero residual variance in the unrestricted regression")]
    ZeroResidualVariance,

    #[error("variance-inflation pruning would remove every column")]
    AllColumnsRemoved,

    #[error("empty residual pool for season {season}")]
    EmptyPool { season: u8 },

    #[error("bootstrap recursion exploded at position {position} (|y| = {magnitude:e})")]
    ExplosiveRecursion { position: usize, magnitude: f64 },

    #[error("block size {block} exceeds series length {len}")]
    BlockTooLong { block: usize, len: usize },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("replicate {index} (seed {seed:#018x}) failed: {source}")]
    Replicate {
        index: usize,
        seed: u64,
        #[source]
        source: Box<HegyError>,
    },
}

impl HegyError {
    /// True for failures caused by the input data rather than by the caller's configuration.
    pub fn is_data_error(&self) -> bool {
        match self {
            HegyError::Configuration(_)
            | HegyError::UnknownColumn(_)
            | HegyError::BlockTooLong { .. }
            | HegyError::AllColumnsRemoved => false,
            HegyError::Replicate { source, .. } => source.is_data_error(),
            _ => true,
        }
    }
}

pub type Result<T> = std::result::Result<T, HegyError>;
