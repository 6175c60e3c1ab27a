//! Error types shared across the simulation engines.

use thiserror::Error;

/// Errors raised by circuit construction, the engines, and serialization.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("circuit width {0} out of range (1..=1024)")]
    InvalidWidth(usize),
    #[error("state width {got} does not match expected width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("operand list must not be empty")]
    EmptyOperands,
    #[error("operand qubit {operand} out of range for width {width}")]
    OperandOutOfRange { operand: usize, width: usize },
    #[error("operand qubit {0} repeated")]
    DuplicateOperand(usize),
    #[error("gate arity {arity} requires {arity} operands, got {got}")]
    OperandCountMismatch { arity: usize, got: usize },
    #[error("local index {local} out of range for block of dimension {dim}")]
    LocalIndexOutOfRange { local: usize, dim: usize },
    #[error("gate arity {0} out of range (1..=4)")]
    InvalidArity(usize),
    #[error("gate '{name}': expected {expected} matrix entries, got {got}")]
    MatrixSizeMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("gate '{name}' has a non-finite matrix entry")]
    NonFiniteEntry { name: String },
    #[error("gate '{name}' is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { name: String, deviation: f64 },
    #[error("unknown standard gate '{0}'")]
    UnknownGate(String),
    #[error("gate index {pc} out of range ({start}..={end})")]
    PcOutOfRange { pc: usize, start: usize, end: usize },
    #[error("corrupted trajectory at gate {pc}: every block output has negligible probability")]
    CorruptedTrajectory { pc: usize },
    #[error("shot count must be at least 1")]
    InvalidShots,
    #[error("memory budget must be at least 1 entry")]
    InvalidBudget,
    #[error("hybrid engine requires a memory budget")]
    BudgetRequired,
    #[error("state vector is empty")]
    EmptyStateVector,
    #[error("snapshot norm {0} is not 1 within 1e-9")]
    SnapshotNotNormalized(f64),
    #[error("gate '{0}' is not a named standard gate or registered defgate")]
    UnserializableGate(String),
    #[error("bitstring '{0}' contains characters other than 0/1")]
    InvalidBitstring(String),
}

pub type Result<T> = std::result::Result<T, Error>;
