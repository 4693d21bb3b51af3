use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Arithmetic outside the domain of an operation, e.g. inverting zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive search or exact enumeration was asked to run on a
    /// parameter range it cannot cover.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Matrix or vector dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A machine configuration violates the locality rules of the
    /// three-machine execution model.
    #[error("machine configuration error: {0}")]
    Config(String),

    /// A state, projector family or unitary fails its structural
    /// invariants at the working tolerance.
    #[error("invalid operator: {0}")]
    Operator(String),

    /// A closed-form bound was requested outside its supported range.
    #[error("range error: {0}")]
    Range(String),

    /// Input files or textual instance descriptions failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// A rewinding or extraction step was driven past a legal state.
    #[error("protocol error: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
