use thiserror::Error;

/// Everything that can go wrong while building fields, enumerating groups or
/// evaluating statistics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree {0} is outside the supported range 1..=4")]
    DegreeOutOfRange(u32),
    #[error("field of order {0} exceeds the supported maximum of 256 elements")]
    FieldTooLarge(u64),
    #[error("no built-in modulus for F_{p}^{k}; supply one explicitly")]
    MissingModulus { p: u32, k: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{what} has {required} elements, above the enumeration cap of {cap}")]
    CapExceeded {
        what: String,
        required: String,
        cap: u64,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invariant factors {0} do not form a divisibility chain")]
    DivisibilityChain(String),
    #[error("invariant factor {0} vanishes at 0, so the class is not invertible")]
    SingularClass(String),
    #[error("no group element has class {0}")]
    UnknownClass(String),
    #[error("family mismatch: expected {expected}, found {found}")]
    FamilyMismatch { expected: String, found: String },
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("product expansion disagrees with the pointwise product at n = {n}")]
    ExpansionMismatch { n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integer overflow while accumulating {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line: 1,
            column,
            message: message.into(),
        }
    }
}
