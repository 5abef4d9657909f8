use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("symbol {symbol} at position {position} is outside alphabet Z_{q}")]
    SymbolOutOfRange { symbol: u32, position: usize, q: u32 },
    #[error("alphabet size must be positive")]
    EmptyAlphabet,
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(u32, u32),
    #[error("index {index} outside [1, {bound}]")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("duplicate index {0}")]
    DuplicateIndex(usize),
    #[error("index set bound {got} does not match expected length {expected}")]
    BoundMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("enumeration budget exceeded: needs {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("site dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("deleting every site leaves an empty system")]
    EmptySystem,
    #[error("all measurement probabilities fell below threshold")]
    ZeroProbability,
    #[error("support outside residue subspace {residue} (leaked weight {leak:e})")]
    ResidueLeak { residue: usize, leak: f64 },
    #[error("syndrome {0:?} has no correction in the lookup table")]
    UnknownSyndrome(Vec<u32>),
    #[error("{erased} erasures exceed code capability {capability}")]
    TooManyErasures { erased: usize, capability: usize },
    #[error("code error: {0}")]
    Code(String),
    #[error("result sequence {0:?} is not a deletion of the periodic marker")]
    NotADeletion(Vec<u32>),
    #[error("deletion positions are ambiguous for {0:?}")]
    AmbiguousDeletion(Vec<u32>),
    #[error("received sequence {0:?} is neither the marker nor in its single indel ball")]
    NotInIndelBall(Vec<u32>),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
