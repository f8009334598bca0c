use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library.
///
/// Variants fall into two groups: validation errors (bad input, limits) and
/// theorem violations. The latter can only be produced by a bug in this crate,
/// since the inequality being checked is a proven statement; the CLI maps them
/// to a distinct exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("{what}: size {size} exceeds limit {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        size: u128,
        limit: u128,
    },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {value} out of range [0, {bound})")]
    OutOfRange { value: u64, bound: u64 },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("polynomial has nonzero constant term")]
    NonzeroConstantTerm,
    #[error("polynomial is zero or constant")]
    ZeroPolynomial,
    #[error("point set is empty")]
    EmptySet,
    #[error("point set contains duplicates")]
    DuplicatePoints,
    #[error("weight sum over the zero fibre vanishes")]
    MuSumZero,
    #[error("F has a coefficient outside the prime field")]
    CoefficientsNotInPrimeField,
    #[error("element {0} is outside the ambient group")]
    ElementOutOfRange(u64),
    #[error("set is not free: {a} - {b} is a forbidden difference")]
    NotFree { a: u64, b: u64 },
    #[error("value {value} outside the domain {domain}")]
    DomainError { value: f64, domain: &'static str },
    #[error("parse error at byte {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("coefficient {value} out of range for a field of size {q}")]
    CoefficientOutOfRange { value: i64, q: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degree bound violated: {0}")]
    DegreeBoundViolated(String),
    #[error("rank bound violated: rank {rank} > {bound}")]
    RankBoundViolated { rank: usize, bound: String },
    #[error("extremal bound violated: {0}")]
    BoundViolated(String),
    #[error("minimizer bracketing failed: {0}")]
    ConvergenceFailure(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that indicate a proven inequality failed to hold.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(
            self,
            Error::DegreeBoundViolated(_)
                | Error::RankBoundViolated { .. }
                | Error::BoundViolated(_)
                | Error::ConvergenceFailure(_)
                | Error::VerificationFailed(_)
                | Error::MuSumZero
        )
    }

    pub(crate) fn limit(what: &'static str, size: u128, limit: u128) -> Self {
        Error::SizeLimitExceeded { what, size, limit }
    }
}
