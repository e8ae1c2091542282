use thiserror::Error;

use crate::codebook::Codebook;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("codeword length {n} cannot hold {m} distinct codewords")]
    InfeasibleLength { n: u32, m: usize },

    #[error("a depth-{depth} code tree cannot hold {m} prefix-free codewords")]
    InfeasibleDepth { depth: u32, m: usize },

    #[error("no prefix code satisfies the rate-reduction bound {eta_max}")]
    InfeasibleRate { eta_max: f64 },

    #[error("tree depth {depth} exceeds the limit of {limit}")]
    DepthOutOfRange { depth: u32, limit: u32 },

    #[error("search stopped after {explored} nodes (budget {budget})")]
    BudgetExhausted {
        budget: u64,
        explored: u64,
        /// Best codebook found before the budget ran out, if any.
        incumbent: Option<Box<Codebook>>,
    },

    #[error("instance too large for exhaustive search ({nodes} tree nodes, limit {limit})")]
    TooLarge { nodes: usize, limit: usize },

    #[error("codebook is empty")]
    EmptyCodebook,

    #[error("codeword must contain at least one bit")]
    EmptyCodeword,

    #[error("duplicate codeword {0}")]
    DuplicateCodeword(String),

    #[error("codeword {prefix} is a prefix of {word}")]
    PrefixViolation { prefix: String, word: String },

    #[error("fixed-length codebook has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("codebook has {found} entries, source has {expected} symbols")]
    SymbolCountMismatch { expected: usize, found: usize },

    #[error("symbol {symbol} at position {position} is out of range for {m} symbols")]
    SymbolOutOfRange { symbol: usize, position: usize, m: usize },

    #[error("stream of {bits} bits is not a multiple of the codeword length {n}")]
    Misaligned { bits: usize, n: usize },

    #[error("no codeword matches the bits at offset {offset}")]
    UnknownCodeword { offset: usize },

    #[error("stream ends inside a codeword starting at bit offset {offset}")]
    Truncated { offset: usize },

    #[error("malformed stream: {0}")]
    MalformedStream(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid { field, reason: reason.into() }
    }
}
