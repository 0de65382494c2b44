use thiserror::Error;

use crate::bnb::BnbOutcome;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the domain box (coordinate {coordinate})")]
    DomainViolation { point: Vec<f64>, coordinate: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("unknown corpus function `{0}`")]
    UnknownFunction(String),

    #[error("function `{0}` has no Lipschitz constant; pass one explicitly")]
    MissingLipschitz(String),

    #[error("region depth limit reached at level {level}")]
    DepthLimit { level: u32 },

    #[error("node budget of {budget} exhausted")]
    NodeBudget { budget: usize, partial: Box<BnbOutcome> },

    #[error("no step size up to m = {cap} satisfies the Armijo condition")]
    StepCap { cap: u32 },

    #[error("direction provider failed: {0}")]
    Direction(String),

    #[error("rect index {0} out of range")]
    RectIndex(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("missing required field `{0}`")]
    MissingField(String),

    #[error("invalid run specification: {0}")]
    InvalidSpec(String),

    #[error("degenerate range [{lo}, {hi}]")]
    DegenerateRange { lo: f64, hi: f64 },
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DomainViolation { .. } => "domain-violation",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Parameter { .. } => "parameter",
            Error::UnknownFunction(_) => "unknown-function",
            Error::MissingLipschitz(_) => "missing-lipschitz",
            Error::DepthLimit { .. } => "depth-limit",
            Error::NodeBudget { .. } => "node-budget",
            Error::StepCap { .. } => "step-cap",
            Error::Direction(_) => "direction",
            Error::RectIndex(_) => "rect-index",
            Error::Empty(_) => "empty",
            Error::MissingField(_) => "missing-field",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::DegenerateRange { .. } => "degenerate-range",
        }
    }

    /// Errors caused by the caller's input rather than by the run itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::Parameter { .. }
                | Error::UnknownFunction(_)
                | Error::MissingLipschitz(_)
                | Error::MissingField(_)
                | Error::InvalidSpec(_)
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
