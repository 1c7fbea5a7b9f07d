use thiserror::Error;

/// Errors raised by tree construction, parsing and the reduction engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("vertex of degree {degree} is not allowed in an unrooted binary tree")]
    NonBinary { degree: usize },
    #[error("duplicate taxon label `{0}`")]
    DuplicateLabel(String),
    #[error("taxon label `{0}` uses the reserved prefix `_z`")]
    ReservedLabel(String),
    #[error("unknown taxon `{0}`")]
    UnknownTaxon(String),
    #[error("taxon set is empty")]
    EmptyTaxa,
    #[error("the two trees are on different taxon sets")]
    TaxonMismatch,
    #[error("{0} is not an edge of the tree")]
    NotAnEdge(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("not a partition of the taxon set: {0}")]
    NotAPartition(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance file: {0}")]
    Instance(String),
    #[error("internal invariant breached: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
