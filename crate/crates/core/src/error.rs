//! Error type shared by every module of the crate.

use thiserror::Error;

/// All failure modes of index construction, navigation and search.
#[derive(Debug, Error)]
pub enum Error {
    /// Positional access outside a structure of the given length.
    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    /// Select for an occurrence rank that does not exist.
    #[error("occurrence {rank} of symbol {symbol} not found (only {available} present)")]
    SelectNotFound {
        symbol: u64,
        rank: usize,
        available: usize,
    },

    /// A documented precondition was violated by the caller or by corrupt state.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// Texts shorter than two bytes cannot be parsed into a tree.
    #[error("input text must contain at least 2 bytes, got {0}")]
    TextTooShort(usize),

    /// Queries shorter than two bytes have no parse tree.
    #[error("query must contain at least 2 bytes, got {0}")]
    QueryTooShort(usize),

    /// Queries longer than the indexed text cannot occur in it.
    #[error("query length {query} exceeds text length {text}")]
    QueryTooLong { query: usize, text: usize },

    /// Serialized index is malformed (bad magic, version, or field contents).
    #[error("index format error: {0}")]
    Format(String),

    /// Serialized index is shorter than its contents promise; `needed` is
    /// the absolute byte offset the parser tried to reach.
    #[error("index file truncated: needs at least {needed} bytes")]
    Truncated { needed: usize },

    /// Serialized index failed its trailing checksum.
    #[error("index checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
