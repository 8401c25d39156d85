use thiserror::Error;

/// Crate-wide error type.  The CLI maps the variants onto exit codes:
/// parse failures exit 1, validation failures exit 2, verification
/// mismatches exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("verification mismatch at exponent {exponent:?}: series has {got}, rank oracle gives {want}")]
    VerifyMismatch {
        exponent: Vec<i64>,
        got: String,
        want: String,
    },

    #[error("missing Brill-Noether locus for (r, d) = ({r}, {d})")]
    MissingLocus { r: i64, d: i64 },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// Exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 1,
            Error::Validation(_) | Error::MissingLocus { .. } | Error::Unsupported(_) => 2,
            Error::VerifyMismatch { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
