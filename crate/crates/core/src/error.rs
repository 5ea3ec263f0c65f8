use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible parameter: {0}")]
    Inadmissible(String),

    #[error("value {value} outside the range ({lo}, {hi}) of the radial transform")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("group element does not act on {0}")]
    GroupMismatch(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("budget must be positive")]
    ZeroBudget,

    #[error("every sample landed on the singular locus ({0} draws)")]
    AllSamplesSingular(usize),

    #[error("evaluation on the singular locus: {0}")]
    SingularLocus(String),

    #[error("x - 2y = {0} is an integer; the floor kernel is invariant at this pair")]
    NoViolation(String),

    #[error("Case B domain: {0}")]
    CaseB(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("kernel is not integrable: {0}")]
    NonIntegrable(String),

    #[error("primal and dual constants disagree: {primal} vs {dual}")]
    DualMismatch { primal: f64, dual: f64 },

    #[error("truncation error {estimate:e} exceeds tolerance {tol:e}")]
    Truncation { estimate: f64, tol: f64 },

    #[error("evaluation point lies on the excluded ray x1 = 0")]
    ExcludedRay,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical scheme, as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_) | Error::NonFinite(_) | Error::Truncation { .. } | Error::DualMismatch { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
