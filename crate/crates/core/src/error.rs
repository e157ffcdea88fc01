use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subspace is the full space; nothing to avoid")]
    FullSpace,
    #[error("constraint vector is identically zero")]
    ZeroVector,
    #[error("enumeration cap exceeded: {players} players, cap {cap}")]
    CapExceeded { players: usize, cap: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),
    #[error("iteration limit {0} exceeded")]
    IterationLimit(usize),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no T-join exists")]
    NoTJoin,
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::FullSpace => "full_space",
            Error::ZeroVector => "zero_vector",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Invalid(_) => "invalid_input",
            Error::Parse(_) => "parse_error",
            Error::OracleInconsistency(_) => "oracle_inconsistency",
            Error::IterationLimit(_) => "iteration_limit",
            Error::Infeasible(_) => "infeasible",
            Error::NoTJoin => "no_t_join",
            Error::BoundExceeded(_) => "bound_exceeded",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
