use thiserror::Error;

pub type Result<T> = std::result::Result<T, HsicError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HsicError {
    #[error("kernel bandwidth must be finite and positive, got {0}")]
    InvalidBandwidth(f64),
    #[error("delta kernel needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("label {label} outside 1..={classes}")]
    LabelOutOfRange { label: i64, classes: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("all pairwise distances are zero; median heuristic bandwidth would be 0")]
    DegenerateBandwidth,

    #[error("block size must be at least 4, got {0}")]
    BlockSizeTooSmall(usize),
    #[error("insufficient samples: need at least {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("covariance estimation needs at least 2 blocks, got {0}")]
    TooFewBlocks(usize),
    #[error("shrinkage must lie in [0, 1), got {0}")]
    InvalidShrinkage(f64),
    #[error("degenerate features (zero within-block variance): {0:?}")]
    DegenerateFeatures(Vec<usize>),
    #[error("score covariance is not positive definite")]
    NotPositiveDefinite,

    #[error("k must satisfy 1 <= k < d (k = {k}, d = {d})")]
    InvalidSelectionSize { k: usize, d: usize },
    #[error("score vector contains a non-finite value at index {0}")]
    NonFiniteScore(usize),
    #[error("constraint index {theta} outside 1..={max}")]
    ConstraintIndexOutOfRange { theta: usize, max: usize },
    #[error("feature {0} is not in the selected set")]
    NotSelected(usize),
    #[error(
        "zero-denominator constraint violated at the observed scores (selected {selected}, unselected {unselected})"
    )]
    InfeasibleConstraint { selected: usize, unselected: usize },
    #[error("truncation interval is empty: [{lower}, {upper}]")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error("variance must be finite and positive, got {0}")]
    InvalidVariance(f64),
    #[error("truncation bounds must satisfy lower < upper, got [{lower}, {upper}]")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("evaluation point {x} outside [{lower}, {upper}]")]
    OutsideSupport { x: f64, lower: f64, upper: f64 },
    #[error("truncated normal mass underflows to zero on [{lower}, {upper}]")]
    PrecisionLoss { lower: f64, upper: f64 },

    #[error("significance level must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("response has {found} rows but features have {expected}")]
    ResponseLength { expected: usize, found: usize },
    #[error("unknown {kind}: {name}")]
    UnknownName { kind: &'static str, name: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl HsicError {
    /// True for failures caused by the data's numerics rather than by
    /// configuration (degenerate covariance, precision loss and the like).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            HsicError::DegenerateFeatures(_)
                | HsicError::NotPositiveDefinite
                | HsicError::InfeasibleConstraint { .. }
                | HsicError::EmptyInterval { .. }
                | HsicError::PrecisionLoss { .. }
                | HsicError::DegenerateBandwidth
                | HsicError::TooFewBlocks(_)
        )
    }
}

impl From<std::io::Error> for HsicError {
    fn from(e: std::io::Error) -> Self {
        HsicError::Io(e.to_string())
    }
}

impl From<csv::Error> for HsicError {
    fn from(e: csv::Error) -> Self {
        HsicError::Io(e.to_string())
    }
}
