use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin label: {0}")]
    InvalidSpin(String),

    #[error("invalid magnetic number: {0}")]
    InvalidMagnetic(String),

    #[error("Bloch vector length {0} is outside [0, 1]")]
    InvalidBlochLength(f64),

    #[error("invalid copy counts: {0}")]
    InvalidCopies(String),

    #[error("invalid extremal map: {0}")]
    InvalidSpec(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("instance too large for the dense oracle: {qubits} qubits (limit {limit})")]
    OversizeInstance { qubits: u32, limit: u32 },

    #[error("invariant violated: {what} (norm {norm:e})")]
    InvariantViolation { what: String, norm: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
