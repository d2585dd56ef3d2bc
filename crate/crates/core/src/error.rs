use thiserror::Error;

/// Every failure mode of the library. Each variant carries a human-readable
/// context string; [`Error::code`] gives a stable machine identifier.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("unsupported boundary: {0}")]
    UnsupportedBoundary(String),
    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("no root in bracket: {0}")]
    NoRoot(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("singular support: {0}")]
    SingularSupport(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("singularity reached: {0}")]
    SingularityReached(String),
    #[error("step size underflow: {0}")]
    Stiffness(String),
    #[error("grid too coarse: {0}")]
    TooCoarse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::GridMismatch(_) => "grid_mismatch",
            Error::DegenerateGrid(_) => "degenerate_grid",
            Error::UnsupportedBoundary(_) => "unsupported_boundary",
            Error::UnsupportedOperator(_) => "unsupported_operator",
            Error::InvalidSchedule(_) => "invalid_schedule",
            Error::UnsupportedExtension(_) => "unsupported_extension",
            Error::Precondition(_) => "precondition",
            Error::InvalidIndex(_) => "invalid_index",
            Error::NoRoot(_) => "no_root",
            Error::Indeterminate(_) => "indeterminate",
            Error::NoBoundState(_) => "no_bound_state",
            Error::DomainViolation(_) => "domain_violation",
            Error::SingularSupport(_) => "singular_support",
            Error::InvalidMetric(_) => "invalid_metric",
            Error::SingularityReached(_) => "singularity_reached",
            Error::Stiffness(_) => "stiffness",
            Error::TooCoarse(_) => "too_coarse",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Serialization(_) => "serialization",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Error::GridMismatch(m)
            | Error::DegenerateGrid(m)
            | Error::UnsupportedBoundary(m)
            | Error::UnsupportedOperator(m)
            | Error::InvalidSchedule(m)
            | Error::UnsupportedExtension(m)
            | Error::Precondition(m)
            | Error::InvalidIndex(m)
            | Error::NoRoot(m)
            | Error::Indeterminate(m)
            | Error::NoBoundState(m)
            | Error::DomainViolation(m)
            | Error::SingularSupport(m)
            | Error::InvalidMetric(m)
            | Error::SingularityReached(m)
            | Error::Stiffness(m)
            | Error::TooCoarse(m)
            | Error::InvalidParameter(m)
            | Error::Serialization(m) => m.clone(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
