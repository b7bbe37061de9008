use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register of {0} qubits exceeds the 3-qubit limit")]
    TooManyQubits(usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator is not unitary")]
    NotUnitary,
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("observable is not bivalent (M² ≠ I)")]
    NotBivalent,
    #[error("invalid target qubits {0:?}")]
    BadTargets(Vec<usize>),
    #[error("projector family is incomplete or not orthogonal")]
    IncompleteProjectors,
    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("direction is not a unit vector (|n| = {0})")]
    NotUnitVector(f64),
    #[error("theta = {0} is outside [0, π/4]")]
    ThetaOutOfRange(f64),
    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
