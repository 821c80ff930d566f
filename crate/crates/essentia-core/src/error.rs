//! Error type shared across the pipeline.

use thiserror::Error;

use crate::corpus::SentenceId;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Raw input was empty or contained only whitespace.
    #[error("empty sentence")]
    EmptySentence,

    /// No usable sentence survived corpus loading.
    #[error("empty document")]
    EmptyDocument,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A structured input file did not parse.
    #[error("invalid input at line {line}: {message}")]
    InvalidFormat { line: usize, message: String },

    /// A configuration invariant does not hold.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Contraction produced a cyclic graph. Groups admitted by the default
    /// partition settings can never trigger this; it guards direct calls on
    /// hand-built groups and the paper-literal partition mode.
    #[error("cycle detected in word-alignment graph")]
    CycleDetected,

    /// The sentence id has no occurrences in the graph being queried.
    #[error("sentence {0} not present in graph")]
    SentenceNotInGraph(SentenceId),

    /// A paraphrase database file yielded zero usable entries.
    #[error("paraphrase database is empty")]
    EmptyDb,

    /// An evaluation operation received an empty pair list.
    #[error("no pairs to evaluate")]
    EmptyInput,
}
