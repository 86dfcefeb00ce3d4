use thiserror::Error;

/// Errors surfaced by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{name} cap exceeded: {value} > {cap}")]
    CapExceeded {
        name: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate partial sum at index {index}: {reason}")]
    PartialSum { index: usize, reason: &'static str },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line: 1,
            column,
            message: message.into(),
        }
    }

    /// Re-anchor a parse error found inside a token at `line`/`column`.
    pub(crate) fn at(self, line: usize, column: usize) -> Self {
        match self {
            Error::Parse {
                column: inner,
                message,
                ..
            } => Error::Parse {
                line,
                column: column + inner - 1,
                message,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
