use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field size {p}^({k}*{m}) is outside the supported range (at most 2^24)")]
    DegreeOverflow { p: u32, k: u32, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero has no discrete logarithm")]
    ZeroHasNoLog,
    #[error("expected {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("encoding {value} is outside a field of size {q}")]
    OutOfRange { value: u32, q: u32 },
    #[error("invalid {0}")]
    InvalidModulus(String),
    #[error("generator is not primitive")]
    InvalidGenerator,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkewError {
    #[error("polynomials belong to different towers")]
    TowerMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("conjugation by zero")]
    ConjugateByZero,
    #[error("the zero polynomial has no root structure")]
    ZeroPolynomial,
    #[error("field of size {0} is too large for an exhaustive root scan")]
    FieldTooLarge(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("system has no solution")]
    NoSolution,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no prime power q0 satisfies {0} within the supported field range")]
    NoSmallPrimePower(String),
    #[error("no inner code found: {0}")]
    NoInnerCode(String),
    #[error("parity-check matrix is not of full row rank")]
    RankDeficientH,
    #[error("message has length {got}, expected {expected}")]
    MessageLength { expected: usize, got: usize },
    #[error("erasure pattern is not admissible: {0}")]
    InadmissiblePattern(String),
    #[error("exhaustive check needs {count} patterns, over the budget of {budget}; use sampled mode")]
    BudgetExceeded { count: u128, budget: u64 },
    #[error("erasures are not correctable")]
    Uncorrectable,
    #[error("received word is inconsistent with every codeword")]
    NotACodeword,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
