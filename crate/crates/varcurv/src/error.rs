use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("grid too small: must contain {0}")]
    DomainTooSmall(&'static str),

    /// The discrete stand-in for an objective that is unbounded below on
    /// R^2: the computed minimizer reached the grid border, so the padded
    /// border-in-complement convention was violated by the inputs.
    #[error("minimizer reached the grid border; energy unbounded below in the continuum limit")]
    UnboundedBelow,

    #[error("level sets not nested at threshold index {0}")]
    NestednessViolation(usize),

    #[error("no convergence: gap {achieved:.3e} > target {target:.3e} after {iters} iterations")]
    NonConvergence {
        target: f64,
        achieved: f64,
        iters: usize,
    },

    #[error("empty level set at s = {0}")]
    EmptyLevelSet(f64),

    #[error("parameter rule violated at step {step}: {detail}")]
    RuleViolation { step: usize, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-parsable code used by the CLI's `ERROR <code>:` prefix.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyInput(_) => "EMPTY_INPUT",
            Error::DomainTooSmall(_) => "DOMAIN_TOO_SMALL",
            Error::UnboundedBelow => "UNBOUNDED_BELOW",
            Error::NestednessViolation(_) => "NESTEDNESS",
            Error::NonConvergence { .. } => "NO_CONVERGENCE",
            Error::EmptyLevelSet(_) => "EMPTY_LEVEL_SET",
            Error::RuleViolation { .. } => "RULE_VIOLATION",
            Error::InvalidParameter(_) => "INVALID_PARAMETER",
            Error::GridMismatch(_) => "GRID_MISMATCH",
            Error::Format(_) => "FORMAT",
            Error::Config(_) => "CONFIG",
            Error::Io(_) => "IO",
        }
    }

    /// Exit-code class: 2 for usage/input errors, 1 for solver or
    /// assertion failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EmptyInput(_)
            | Error::DomainTooSmall(_)
            | Error::InvalidParameter(_)
            | Error::GridMismatch(_)
            | Error::Format(_)
            | Error::Config(_)
            | Error::Io(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
