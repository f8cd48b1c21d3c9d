use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("state {state} has both input and output transitions or is misplaced in the partition")]
    PartitionViolation { state: String },
    #[error("output state {state} has more than one outgoing transition")]
    EmissionNondeterminism { state: String },
    #[error("symbol '{symbol}' is reserved for endmarkers")]
    ReservedSymbolClash { symbol: char },
    #[error("automaton must be deterministic and complete")]
    NotComplete,
    #[error("automaton is not deterministic")]
    NotDeterministic,
    #[error("no certificate found with at most {bound} blocks")]
    BoundExhausted { bound: usize },
    #[error("certificate does not hold for this automaton: {reason}")]
    InvalidCertificate { reason: String },
    #[error("language is not {expected}-controlled; offending word {witness}")]
    ShapeViolation { expected: String, witness: String },
    #[error("word mixes input and output letters")]
    MixedTapes,
    #[error("profiles were built over different parameters")]
    ParameterMismatch,
    #[error("profile closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },
    #[error("language is not endmarked")]
    MissingEndmarkers,
    #[error("the initial vertex is not winning for the output player")]
    NotWinning,
    #[error("state space exceeded the cap of {cap} states while building {what}")]
    StateCapExceeded { what: String, cap: usize },
    #[error("{which} language has infinite shiftlag (witness {witness}); the general procedure needs finite shiftlag")]
    OutsideHypotheses { which: String, witness: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
