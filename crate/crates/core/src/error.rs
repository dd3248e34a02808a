use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Fock dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("generator count mismatch: expected {expected}, found {found}")]
    GeneratorMismatch { expected: usize, found: usize },

    #[error("letter {letter} is outside 1..={n}")]
    LetterOutOfRange { letter: usize, n: usize },

    #[error("part count {parts} is outside 1..={len}")]
    PartCount { parts: usize, len: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("regularity violated: {0}")]
    Regularity(String),

    #[error("unsupported composition: {0}")]
    Composition(String),

    #[error("word of length {len} exceeds truncation depth {depth}")]
    WordTooLong { len: usize, depth: usize },

    #[error("weight table covers degree {have}, need {need}")]
    WeightTableShort { have: usize, need: usize },

    #[error("binomial C({top}, {bottom}) is outside exact integer range")]
    BinomialOverflow { top: usize, bottom: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("defect is indefinite: minimum eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    IndefiniteDefect { min_eigenvalue: f64, tol: f64 },

    #[error("tuple is not a member of the domain (minimum defect eigenvalue {min_eigenvalue:e})")]
    NotMember { min_eigenvalue: f64 },

    #[error("joint spectral radius estimate {0} is not below 1")]
    SpectralRadius(f64),

    #[error("matrix is singular or ill-conditioned (condition number {0:e})")]
    Singular(f64),

    #[error("map is not tangent to the identity: {0}")]
    NotTangent(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
