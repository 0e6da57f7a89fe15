use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("rank error: expected rank {expected}, found {found}")]
    Rank { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("context mismatch: p = {left} vs p = {right}")]
    ContextMismatch { left: u64, right: u64 },
    #[error("lattice does not fit in the window of radius {a}")]
    WindowViolation { a: u32 },
    #[error("window too large: {size} group elements exceed the enumeration guard")]
    WindowTooLarge { size: u128 },
    #[error("window mismatch: {0}")]
    WindowMismatch(String),
    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
