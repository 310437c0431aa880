//! Error type shared by every module of the library.

use thiserror::Error;

/// Errors raised while parsing, validating or transforming ADL artefacts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input text; `pos` is a byte offset (formulas) or a line number (files).
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// A concept name that is not declared in the active signature.
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),

    /// A role name that is not declared in the active signature.
    #[error("unknown role `{0}`")]
    UnknownRole(String),

    /// An individual that does not exist in the model.
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),

    /// A named individual that is not declared.
    #[error("unknown name `{0}`")]
    UnknownName(String),

    /// A probability outside `[0, 1]` or an otherwise invalid number.
    #[error("invalid number `{0}`")]
    InvalidNumber(String),

    /// A structural model invariant is broken (row sums, id coherence, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// An A-Book where the role assertions out of one name sum above one.
    #[error("ill-formed knowledge base: {0}")]
    IllFormed(String),

    /// An operation that needs a simple T-Book received a non-simple one.
    #[error("T-Book is not simple: {0}")]
    NotSimple(String),

    /// An operation that needs an acyclic T-Book received a cyclic one.
    #[error("T-Book is cyclic: {0}")]
    Cyclic(String),

    /// Conditioning on an event of probability zero.
    #[error("observation has probability zero")]
    ZeroProbability,

    /// A desk-scale enumeration guard was hit.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    /// Any other violated precondition.
    #[error("{0}")]
    Precondition(String),
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, Error>;
