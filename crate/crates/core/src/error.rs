use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },

    #[error("matrix set is empty")]
    EmptySet,

    #[error("automaton has no letters")]
    EmptyAlphabet,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("matrix has no total support")]
    NoTotalSupport,

    #[error("transition undefined on state {state} at word position {position}")]
    UndefinedTransition { state: usize, position: usize },

    #[error("automaton is not complete")]
    NotComplete,

    #[error("automaton is not synchronizing")]
    NotSynchronizing,

    #[error("automaton is not carefully synchronizing")]
    NotCarefullySynchronizing,

    #[error("greedy procedure stuck at image bound {k}: {reason}")]
    ProcedureStuck { k: usize, reason: String },

    #[error("matrix set is not primitive")]
    NotPrimitive,

    #[error("product cap exceeded after {products_seen} distinct products")]
    CapExceeded { products_seen: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("letter cap exceeded: {required} letters required")]
    LetterCapExceeded { required: u128 },

    #[error("automaton has no sink state")]
    NoSink,

    #[error("alphabet partition is not a class C partition: {0}")]
    NotClassC(String),

    #[error("matrix {index} has a zero row or column")]
    NotNz { index: usize },

    #[error("alphabet of size {size} exceeds the enumeration cap {max}")]
    AlphabetTooLarge { size: usize, max: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),
}
