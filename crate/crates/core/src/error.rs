use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the library. `Input` marks malformed user data;
/// every other variant is a mathematical failure or precondition violation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("scalars from different fields")]
    FieldMismatch,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("subspace is not contained in the ambient space")]
    NotContained,
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("argument {0} is not homogeneous")]
    Inhomogeneous(usize),
    #[error("slot position {position} out of range for a word of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("word length {len} exceeds the cap {cap}")]
    WordCapExceeded { len: usize, cap: usize },
    #[error("degree contract violated: {0}")]
    DegreeContract(String),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("characteristic {char} too small for word length {cap}")]
    CharTooSmall { char: u64, cap: usize },
    #[error("twisted series does not terminate: {0}")]
    NonTerminatingSeries(String),
    #[error("element has odd degree")]
    OddDegree,
    #[error("not a twisting element: nonzero residual {0}")]
    NotTwisting(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("defining system obstructed at ({i},{j}) with class {class:?}")]
    Obstructed { i: usize, j: usize, class: Vec<String> },
    #[error("search space of {needed} systems exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("invalid defining system: {0}")]
    InvalidSystem(String),
    #[error("hypothesis fails at ({i},{j})")]
    HypothesisFailed { i: usize, j: usize },
    #[error("algebra is not C-infinity: {0}")]
    NotCInfty(String),
    #[error("twisting element has a component of non-positive degree")]
    PositiveDegreeRequired,
    #[error("operation requires a Z-graded algebra")]
    ZGradingRequired,
    #[error("invalid witness: {0}")]
    WitnessInvalid(String),
    #[error("not a representative of a page class: {0}")]
    NotRepresentative(String),
    #[error("identity check failed: {0}")]
    CheckFailed(String),
    #[error("input error: {0}")]
    Input(String),
}

impl Error {
    /// True for malformed input as opposed to a failed mathematical check.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Input(_)
                | Error::ArityMismatch { .. }
                | Error::SizeMismatch(_)
                | Error::EndpointMismatch(_)
                | Error::PositionOutOfRange { .. }
                | Error::FieldMismatch
                | Error::DegreeContract(_)
        )
    }
}
