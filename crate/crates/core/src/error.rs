use thiserror::Error;

/// Errors raised by the models, the register and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model validity: {0}")]
    ModelValidity(String),

    #[error("unknown atom label `{0}`")]
    UnknownAtom(String),

    #[error("causality violation: read at {read_us:.3} us precedes write at {write_us:.3} us")]
    Causality { write_us: f64, read_us: f64 },

    #[error("timeline is not sorted: event {index} at {time_us:.3} us")]
    Ordering { index: usize, time_us: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for problems with the user's input (configuration, parameters, files to parse)
    /// rather than failures while running.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parse { .. } | Error::Parameter(_) | Error::ModelValidity(_))
    }
}
