use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors fall into three families that the command line front end maps
/// onto distinct exit codes: bad input, violated mathematical hypotheses,
/// and failed internal cross-checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{value} is rational, it has no periodic continued fraction")]
    RationalInput { value: String },

    #[error("continued fraction of {value} is periodic but not purely periodic (preperiod {preperiod})")]
    NotPurelyPeriodic { value: String, preperiod: usize },

    #[error("{value} is not reduced: {reason}")]
    NotReduced { value: String, reason: String },

    #[error("no period found within {bound} steps")]
    PeriodBound { bound: usize },

    #[error("label ({c},{d}) is not coprime to the modulus {q}")]
    LabelNotCoprime { c: u64, d: u64, q: u64 },

    #[error("term budget exceeded: {needed} terms requested, limit is {limit}")]
    TermLimit { needed: u64, limit: u64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("internal verification failed: {0}")]
    Verification(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Hypothesis,
    Verification,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_)
            | Error::RationalInput { .. }
            | Error::LabelNotCoprime { .. }
            | Error::TermLimit { .. } => ErrorKind::Config,
            Error::NotPurelyPeriodic { .. }
            | Error::NotReduced { .. }
            | Error::PeriodBound { .. }
            | Error::Hypothesis(_) => ErrorKind::Hypothesis,
            Error::Verification(_) => ErrorKind::Verification,
        }
    }
}
