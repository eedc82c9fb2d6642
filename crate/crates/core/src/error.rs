use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed truth literal `{literal}`: {reason}")]
    TruthLiteral { literal: String, reason: String },

    #[error("invalid truth value: {0}")]
    InvalidTruth(String),

    #[error("letter `{0}` is not in the alphabet")]
    ForeignLetter(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("automaton failed validation: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("variable `{0}` is not part of the extended alphabet")]
    UnknownVariable(String),

    #[error("formula is not restricted: {}", .0.join("; "))]
    NotRestricted(Vec<String>),

    #[error("i/o error on `{path}`: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
