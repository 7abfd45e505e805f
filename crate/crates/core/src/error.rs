use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field parameter {0} is not square-free")]
    NotSquareFree(i64),

    #[error("field parameter {value} out of range (minimum {min})")]
    FieldOutOfRange { value: i64, min: i64 },

    #[error("bound Q={q} is below the minimum {min}")]
    BoundTooSmall { q: i64, min: i64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A fixed-width fast path or a floating-point search box would lose
    /// exactness for the requested size.
    #[error("arithmetic capacity exceeded: {0}")]
    Capacity(String),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity(_))
    }
}
