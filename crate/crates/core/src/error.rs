use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("series did not converge: {0}")]
    Convergence(String),
    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("zero pivot: {0}")]
    ZeroPivot(String),
    #[error("degenerate form: {0}")]
    DegenerateForm(String),
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("singular step: {0}")]
    SingularStep(String),
    #[error("phase error: {0}")]
    Phase(String),
    #[error("singular modulus: {0}")]
    SingularModulus(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("methods disagree: {0}")]
    Disagreement(String),
}

impl Error {
    /// True for failures of a numerical process rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
