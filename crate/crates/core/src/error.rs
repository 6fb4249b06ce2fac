use thiserror::Error;

/// Errors produced while building models or coding streams.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mixture must have between 1 and {max} components, got {got}")]
    ComponentCount { got: usize, max: usize },

    #[error("invalid mixture parameters: {0}")]
    InvalidParams(&'static str),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("symbol {symbol} at index {index} lies outside the coding alphabet")]
    SymbolOutOfAlphabet { index: usize, symbol: i32 },

    #[error("got {symbols} symbols but {params} parameter sets")]
    LengthMismatch { symbols: usize, params: usize },

    #[error("truncated stream")]
    TruncatedStream,

    #[error("header mismatch: {0}")]
    HeaderMismatch(String),

    #[error("corrupt stream: {0}")]
    CorruptStream(&'static str),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("cannot allocate {0} table entries")]
    ResourceExhausted(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
