use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported parameter set: {0}")]
    UnsupportedParameter(u32),
    #[error("unknown group id {0:#04x}")]
    UnknownGroup(u8),
    #[error("parameter set mismatch (p={left} vs p={right})")]
    ParamMismatch { left: usize, right: usize },
    /// Regular outcome of `invert_r3` when `gcd(g, x^p - x - 1)` is not constant.
    #[error("element is not invertible")]
    NotInvertible,
    #[error("element at index {0} is not invertible")]
    NotInvertibleAt(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("random number generator failure: {0}")]
    Rng(String),
    #[error("invalid pool size {0:?}: expected a positive integer")]
    InvalidPoolSize(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

impl From<rand::Error> for Error {
    fn from(e: rand::Error) -> Self {
        Error::Rng(e.to_string())
    }
}

/// Failures while parsing the byte encodings of keys and ciphertexts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unknown group id {0:#04x}")]
    UnknownGroup(u8),
    #[error("wrong group id: expected {expected:#04x}, found {found:#04x}")]
    WrongGroup { expected: u8, found: u8 },
    #[error("wrong length: expected {expected} bytes, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("coefficient {index} out of range")]
    CoefficientOutOfRange { index: usize },
    #[error("secret polynomial has weight {found}, expected {expected}")]
    WeightMismatch { expected: usize, found: usize },
}
