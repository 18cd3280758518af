use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("dense dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("qubit count {0} exceeds the supported maximum of 64")]
    TooManyQubits(usize),

    #[error("syntax error at {position}: {reason}")]
    Syntax { position: usize, reason: String },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("span is not a *-algebra (closed under products and adjoints, containing I)")]
    NotAnAlgebra,

    #[error("central element sample stayed degenerate after {0} attempts")]
    DegenerateCenter(usize),

    #[error("non-integer block data: {0}")]
    NonIntegerBlock(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("generators are rank deficient: symplectic rank {found}, need {needed}")]
    RankDeficient { found: usize, needed: usize },

    #[error("generated subgroups overlap beyond the identity")]
    SubgroupOverlap,
}

pub type Result<T> = std::result::Result<T, Error>;
